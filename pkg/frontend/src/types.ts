/** Wire formats of the matching service (mirrored field for field). */

export interface ScoringConfig {
  w_compat: number;
  w_dist: number;
  w_att: number;
  w_company: number;
  attitude_min: number;
  distance_max_km: number;
  compat_min: number;
}

export interface CandidateForm {
  id: string;
  lat: number | null;
  lon: number | null;
  education_level: number;
  disability_type: string;
  attitude: number;
  years_experience: number;
  unemployment_months: number;
  skills_text: string;
  exclusions: string; // ';'-separated, as in the CSV schema
}

export interface Explanation {
  compat: number;
  dist_factor: number;
  attitude: number;
  company_factor: number;
}

export interface Recommendation {
  company_id: string;
  name: string;
  sector: string;
  final: number;
  compat: number;
  dist_factor: number;
  attitude: number;
  company_factor: number;
  distance_km: number;
  employee_count: number;
  open_positions: number;
  remote_available: boolean;
  certified: boolean;
  explanation: Explanation;
  success_proba?: number;
}

export interface FilteredCompany {
  company_id: string;
  name: string;
  gate: string;
}

export interface MatchResponse {
  request_id: string;
  config: ScoringConfig;
  results: Recommendation[];
  filtered?: FilteredCompany[];
}

export interface OverrideResponse {
  request_id: string;
  operator_action: { action: string; reason: string };
}

export interface AnalyticsSnapshot {
  totals: { candidates: number; companies: number; open_positions: number };
  mean_attitude: number;
  disability_histogram: Record<string, number>;
  sector_histogram: Record<string, number>;
  latency_seconds: { count: number; p50: number; p95: number; p99: number };
}

export const DISABILITY_TYPES = [
  'motoria',
  'visiva',
  'uditiva',
  'intellettiva',
  'psichica',
  'altro',
] as const;

/** Operator-adjustable thresholds and their UI bounds. */
export const THRESHOLD_BOUNDS: Record<string, { min: number; max: number }> = {
  attitude_min: { min: 0, max: 1 },
  distance_max_km: { min: 5, max: 50 },
  compat_min: { min: 0, max: 1 },
};
