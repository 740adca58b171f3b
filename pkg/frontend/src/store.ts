/** Console state machine.
 *
 * Invariants enforced here rather than in the DOM layer:
 *  - the displayed config always equals the last server-acknowledged one
 *    (a rejected PUT leaves it untouched, so sliders snap back);
 *  - results are flagged stale from the moment a config change is
 *    acknowledged until the automatic re-query lands;
 *  - at most one match request is in flight, later ones abort earlier;
 *  - no score is ever computed client-side: every number in the state
 *    comes verbatim from a server response.
 */

import { ApiClient, ApiError } from './api.js';
import {
  CandidateForm,
  FilteredCompany,
  MatchResponse,
  Recommendation,
  ScoringConfig,
  THRESHOLD_BOUNDS,
} from './types.js';
import { FieldError, validateCandidate, validateOverrideReason } from './validation.js';

export interface ConsoleState {
  config: ScoringConfig | null;
  results: Recommendation[] | null;
  filtered: FilteredCompany[] | null;
  requestId: string | null;
  stale: boolean;
  loading: boolean;
  fieldErrors: FieldError[];
  toast: string | null;
  overrideConfirmation: string | null;
}

type Listener = (state: ConsoleState) => void;

export function clampThreshold(name: string, value: number): number {
  const bounds = THRESHOLD_BOUNDS[name];
  if (!bounds) {
    return value;
  }
  return Math.min(bounds.max, Math.max(bounds.min, value));
}

export class ConsoleStore {
  state: ConsoleState = {
    config: null,
    results: null,
    filtered: null,
    requestId: null,
    stale: false,
    loading: false,
    fieldErrors: [],
    toast: null,
    overrideConfirmation: null,
  };

  private listeners: Listener[] = [];
  private activeCandidate: CandidateForm | null = null;
  private inflight: AbortController | null = null;

  constructor(
    private api: ApiClient,
    public k: number = 10,
    public includeFiltered: boolean = true,
  ) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(patch: Partial<ConsoleState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  async loadConfig(): Promise<void> {
    const config = await this.api.getConfig();
    this.emit({ config });
  }

  /** Validate and submit the candidate form; invalid forms never leave the client. */
  async submitCandidate(form: CandidateForm): Promise<boolean> {
    const errors = validateCandidate(form);
    if (errors.length > 0) {
      this.emit({ fieldErrors: errors });
      return false;
    }
    this.activeCandidate = form;
    this.emit({ fieldErrors: [] });
    return this.refresh();
  }

  /** Re-query the active candidate; cancels any in-flight request. */
  async refresh(): Promise<boolean> {
    if (this.activeCandidate === null) {
      return false;
    }
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.emit({ loading: true });
    let response: MatchResponse;
    try {
      response = await this.api.match(this.activeCandidate, this.k, this.includeFiltered, controller.signal);
    } catch (err) {
      if (controller.signal.aborted) {
        return false; // superseded by a newer request
      }
      this.emit({ loading: false, toast: describeError(err) });
      return false;
    }
    if (controller.signal.aborted) {
      return false;
    }
    this.inflight = null;
    this.emit({
      loading: false,
      results: response.results,
      filtered: response.filtered ?? null,
      requestId: response.request_id,
      config: response.config,
      stale: false,
      overrideConfirmation: null,
    });
    return true;
  }

  /**
   * Push one threshold to the server (clamped to its UI bounds) and
   * automatically re-query the active candidate. Previous results are
   * marked stale while the refresh is in flight.
   */
  async adjustThreshold(name: string, value: number): Promise<void> {
    const clamped = clampThreshold(name, value);
    let acknowledged: ScoringConfig;
    try {
      acknowledged = await this.api.putConfig({ [name]: clamped });
    } catch (err) {
      // rejected: keep the last acknowledged config (slider snaps back)
      this.emit({ toast: describeError(err) });
      return;
    }
    this.emit({ config: acknowledged, stale: this.state.results !== null });
    await this.refresh();
  }

  async recordOverride(decision: string, reason: string): Promise<boolean> {
    const requestId = this.state.requestId;
    if (!requestId) {
      this.emit({ toast: 'no match on screen to override' });
      return false;
    }
    const errors = validateOverrideReason(decision, reason);
    if (errors.length > 0) {
      this.emit({ fieldErrors: errors });
      return false;
    }
    try {
      const resp = await this.api.override(requestId, decision, reason);
      this.emit({
        fieldErrors: [],
        overrideConfirmation: `recorded ${resp.operator_action.action} for request ${resp.request_id}`,
      });
      return true;
    } catch (err) {
      this.emit({ toast: describeError(err) });
      return false;
    }
  }

  clearToast(): void {
    this.emit({ toast: null });
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `server rejected the request (${err.status}): ${err.detail}`;
  }
  return err instanceof Error ? err.message : String(err);
}
