/** Console bootstrap: login prompt, form wiring, threshold sliders,
 * override panel and the analytics view. */

import { ApiClient } from './api.js';
import { ConsoleStore, clampThreshold } from './store.js';
import { CandidateForm, THRESHOLD_BOUNDS } from './types.js';
import { renderAnalytics, renderResults } from './ui.js';

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function readForm(): CandidateForm {
  const num = (id: string) => {
    const raw = byId<HTMLInputElement>(id).value.trim();
    return raw === '' ? NaN : Number(raw);
  };
  const latRaw = byId<HTMLInputElement>('f-lat').value.trim();
  const lonRaw = byId<HTMLInputElement>('f-lon').value.trim();
  return {
    id: byId<HTMLInputElement>('f-id').value,
    lat: latRaw === '' ? null : Number(latRaw),
    lon: lonRaw === '' ? null : Number(lonRaw),
    education_level: num('f-education'),
    disability_type: byId<HTMLSelectElement>('f-disability').value,
    attitude: num('f-attitude'),
    years_experience: num('f-experience'),
    unemployment_months: num('f-unemployment'),
    skills_text: byId<HTMLTextAreaElement>('f-skills').value,
    exclusions: byId<HTMLInputElement>('f-exclusions').value,
  };
}

function setupSlider(store: ConsoleStore, inputId: string, labelId: string, name: string): void {
  const input = byId<HTMLInputElement>(inputId);
  const bounds = THRESHOLD_BOUNDS[name];
  input.min = String(bounds.min);
  input.max = String(bounds.max);
  input.addEventListener('change', () => {
    const value = clampThreshold(name, Number(input.value));
    input.value = String(value);
    void store.adjustThreshold(name, value);
  });
  store.subscribe((state) => {
    if (state.config) {
      const ack = (state.config as unknown as Record<string, number>)[name];
      input.value = String(ack); // snaps back when the server rejected
      byId(labelId).textContent = String(ack);
    }
  });
}

function main(): void {
  const baseUrl = localStorage.getItem('jobmatch-url') ?? 'http://127.0.0.1:8000';
  const token = window.prompt('service token (leave empty if authentication is off)', '') || null;
  const api = new ApiClient(baseUrl, token);
  const store = new ConsoleStore(api);

  const resultsPane = byId('results');
  const errorsPane = byId('form-errors');
  const toastPane = byId('toast');
  const overrideStatus = byId('override-status');

  store.subscribe((state) => {
    renderResults(state, resultsPane);
    errorsPane.replaceChildren(
      ...state.fieldErrors.map((e) => {
        const li = document.createElement('li');
        li.textContent = `${e.field}: ${e.message}`;
        return li;
      }),
    );
    toastPane.textContent = state.toast ?? '';
    toastPane.hidden = state.toast === null;
    overrideStatus.textContent = state.overrideConfirmation ?? '';
    byId<HTMLButtonElement>('submit-btn').disabled = state.loading;
  });

  byId<HTMLFormElement>('candidate-form').addEventListener('submit', (event) => {
    event.preventDefault();
    void store.submitCandidate(readForm());
  });

  setupSlider(store, 's-attitude', 'v-attitude', 'attitude_min');
  setupSlider(store, 's-distance', 'v-distance', 'distance_max_km');
  setupSlider(store, 's-compat', 'v-compat', 'compat_min');

  byId<HTMLFormElement>('override-form').addEventListener('submit', (event) => {
    event.preventDefault();
    const decision = byId<HTMLSelectElement>('o-action').value;
    const reason = byId<HTMLTextAreaElement>('o-reason').value;
    void store.recordOverride(decision, reason);
  });

  const workspace = byId('view-workspace');
  const analyticsView = byId('view-analytics');
  byId('tab-workspace').addEventListener('click', () => {
    workspace.hidden = false;
    analyticsView.hidden = true;
  });
  byId('tab-analytics').addEventListener('click', async () => {
    workspace.hidden = true;
    analyticsView.hidden = false;
    renderAnalytics(await api.analytics(), byId('analytics-content'));
  });

  void store.loadConfig().catch((err) => {
    toastPane.textContent = `cannot reach the service at ${baseUrl}: ${err}`;
    toastPane.hidden = false;
  });
}

main();
