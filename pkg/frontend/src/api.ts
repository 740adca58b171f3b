/** Thin typed client over the service endpoints. The fetch function is
 * injectable so tests can stub the transport. */

import {
  AnalyticsSnapshot,
  CandidateForm,
  MatchResponse,
  OverrideResponse,
  ScoringConfig,
} from './types.js';
import { parseExclusions } from './validation.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    public baseUrl: string,
    private token: string | null = null,
    private fetchFn: FetchLike = fetch,
  ) {}

  private headers(): Record<string, string> {
    const headers: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.token) {
      headers['Authorization'] = `Bearer ${this.token}`;
    }
    return headers;
  }

  private async request<T>(method: string, path: string, body?: unknown, signal?: AbortSignal): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
      signal,
    });
    const text = await resp.text();
    let parsed: unknown = null;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      parsed = text;
    }
    if (!resp.ok) {
      const detail =
        parsed && typeof parsed === 'object' && 'detail' in parsed
          ? String((parsed as { detail: unknown }).detail)
          : String(parsed);
      throw new ApiError(resp.status, detail);
    }
    return parsed as T;
  }

  health(): Promise<{ status: string; candidates: number; companies: number }> {
    return this.request('GET', '/health');
  }

  getConfig(): Promise<ScoringConfig> {
    return this.request('GET', '/config');
  }

  putConfig(values: Partial<ScoringConfig>): Promise<ScoringConfig> {
    return this.request('PUT', '/config', values);
  }

  match(form: CandidateForm, k: number, includeFiltered: boolean, signal?: AbortSignal): Promise<MatchResponse> {
    const payload = {
      candidate: {
        id: form.id,
        lat: form.lat,
        lon: form.lon,
        education_level: form.education_level,
        disability_type: form.disability_type,
        attitude: form.attitude,
        years_experience: form.years_experience,
        unemployment_months: form.unemployment_months,
        skills_text: form.skills_text,
        exclusions: parseExclusions(form.exclusions),
      },
      k,
      include_filtered: includeFiltered,
    };
    return this.request('POST', '/match', payload, signal);
  }

  matchById(candidateId: string, k: number, signal?: AbortSignal): Promise<MatchResponse> {
    return this.request('POST', '/match', { candidate_id: candidateId, k }, signal);
  }

  override(requestId: string, action: string, reason: string): Promise<OverrideResponse> {
    return this.request('POST', '/override', { request_id: requestId, action, reason });
  }

  analytics(): Promise<AnalyticsSnapshot> {
    return this.request('GET', '/analytics');
  }
}
