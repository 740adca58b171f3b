/** Client-side form validation mirroring the ingest rules: invalid forms
 * never reach the server. */

import { CandidateForm, DISABILITY_TYPES } from './types.js';

export interface FieldError {
  field: string;
  message: string;
}

export function validateCandidate(form: CandidateForm): FieldError[] {
  const errors: FieldError[] = [];
  if (!form.id.trim()) {
    errors.push({ field: 'id', message: 'identifier is required' });
  }
  if (form.lat === null || form.lon === null || Number.isNaN(form.lat) || Number.isNaN(form.lon)) {
    errors.push({ field: 'lat', message: 'coordinates are required' });
  } else {
    if (form.lat < -90 || form.lat > 90) {
      errors.push({ field: 'lat', message: 'latitude must be within [-90, 90]' });
    }
    if (form.lon < -180 || form.lon > 180) {
      errors.push({ field: 'lon', message: 'longitude must be within [-180, 180]' });
    }
  }
  if (!(form.attitude >= 0 && form.attitude <= 1)) {
    errors.push({ field: 'attitude', message: 'attitude must be within [0, 1]' });
  }
  if (!Number.isInteger(form.education_level) || form.education_level < 0 || form.education_level > 4) {
    errors.push({ field: 'education_level', message: 'education level is an integer 0..4' });
  }
  if (!(DISABILITY_TYPES as readonly string[]).includes(form.disability_type)) {
    errors.push({ field: 'disability_type', message: 'unknown disability type' });
  }
  if (!(form.years_experience >= 0)) {
    errors.push({ field: 'years_experience', message: 'experience cannot be negative' });
  }
  if (!Number.isInteger(form.unemployment_months) || form.unemployment_months < 0) {
    errors.push({ field: 'unemployment_months', message: 'months are a non-negative integer' });
  }
  return errors;
}

export function validateOverrideReason(action: string, reason: string): FieldError[] {
  if (action === 'overridden' && !reason.trim()) {
    return [{ field: 'reason', message: 'a reason is required when overriding' }];
  }
  return [];
}

export function parseExclusions(raw: string): string[] {
  return raw
    .split(';')
    .map((p) => p.trim())
    .filter((p) => p.length > 0);
}
