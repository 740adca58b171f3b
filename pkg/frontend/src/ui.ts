/** DOM rendering for the two console views. All numbers shown come from
 * server responses held in the store; this layer only formats them. */

import { ConsoleState } from './store.js';
import { AnalyticsSnapshot, Recommendation } from './types.js';

const COMPONENT_LABELS: Array<[keyof Recommendation['explanation'], string]> = [
  ['compat', 'compatibility'],
  ['dist_factor', 'distance'],
  ['attitude', 'attitude'],
  ['company_factor', 'company'],
];

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Array<Node | string> = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function contributionBars(rec: Recommendation): HTMLElement {
  const wrap = el('div', { class: 'bars', role: 'img', 'aria-label': contributionSummary(rec) });
  const total = rec.final > 0 ? rec.final : 1;
  for (const [key, label] of COMPONENT_LABELS) {
    const value = rec.explanation[key];
    const width = Math.max(0, Math.min(100, (value / total) * 100));
    wrap.append(
      el('div', { class: 'bar-row' }, [
        el('span', { class: 'bar-label' }, [label]),
        el('div', { class: 'bar-track' }, [
          el('div', { class: `bar-fill bar-${key}`, style: `width:${width.toFixed(1)}%` }),
        ]),
        el('span', { class: 'bar-value' }, [value.toFixed(3)]),
      ]),
    );
  }
  return wrap;
}

function contributionSummary(rec: Recommendation): string {
  return COMPONENT_LABELS.map(([key, label]) => `${label} ${rec.explanation[key].toFixed(3)}`).join(', ');
}

export function renderResults(state: ConsoleState, container: HTMLElement): void {
  container.replaceChildren();
  if (state.stale) {
    container.append(el('p', { class: 'stale-banner', role: 'status' }, ['results are stale, refreshing…']));
  }
  if (state.results === null) {
    container.append(el('p', { class: 'hint' }, ['submit a candidate to see ranked companies']));
    return;
  }
  if (state.results.length === 0) {
    container.append(
      el('p', { class: 'empty-state', role: 'status' }, ['no matches under current thresholds']),
    );
  }
  for (const [index, rec] of state.results.entries()) {
    const badges: string[] = [];
    if (rec.remote_available) badges.push('remote ok');
    if (rec.certified) badges.push('certified');
    const card = el('article', { class: 'result-card', 'aria-label': `match ${rec.name}` }, [
      el('header', { class: 'result-head' }, [
        el('span', { class: 'rank' }, [`#${index + 1}`]),
        el('h3', {}, [rec.name]),
        el('span', { class: 'final-score' }, [rec.final.toFixed(3)]),
      ]),
      el('p', { class: 'result-meta' }, [
        `${rec.sector} · ${rec.distance_km.toFixed(1)} km · ${rec.employee_count} employees · ` +
          `${rec.open_positions} open positions${badges.length ? ' · ' + badges.join(' · ') : ''}` +
          (rec.success_proba !== undefined ? ` · est. success ${(rec.success_proba * 100).toFixed(0)}%` : ''),
      ]),
      contributionBars(rec),
    ]);
    container.append(card);
  }
  if (state.filtered && state.filtered.length > 0) {
    const list = el('ul', { class: 'filtered-list' });
    for (const f of state.filtered) {
      list.append(el('li', {}, [`${f.name}: ${f.gate.replaceAll('_', ' ')}`]));
    }
    container.append(
      el('details', { class: 'filtered' }, [
        el('summary', {}, [`${state.filtered.length} companies filtered by gates`]),
        list,
      ]),
    );
  }
}

export function renderAnalytics(snapshot: AnalyticsSnapshot, container: HTMLElement): void {
  container.replaceChildren();
  container.append(
    el('div', { class: 'totals' }, [
      statBox('candidates', String(snapshot.totals.candidates)),
      statBox('companies', String(snapshot.totals.companies)),
      statBox('open positions', String(snapshot.totals.open_positions)),
      statBox('mean attitude', snapshot.mean_attitude.toFixed(3)),
      statBox('match p50', `${(snapshot.latency_seconds.p50 * 1000).toFixed(0)} ms`),
    ]),
    histogram('candidates by disability type', snapshot.disability_histogram),
    histogram('companies by sector', snapshot.sector_histogram),
  );
}

function statBox(label: string, value: string): HTMLElement {
  return el('div', { class: 'stat' }, [
    el('span', { class: 'stat-value' }, [value]),
    el('span', { class: 'stat-label' }, [label]),
  ]);
}

function histogram(title: string, data: Record<string, number>): HTMLElement {
  const max = Math.max(1, ...Object.values(data));
  const rows = Object.entries(data).map(([key, count]) =>
    el('div', { class: 'bar-row' }, [
      el('span', { class: 'bar-label' }, [key]),
      el('div', { class: 'bar-track' }, [
        el('div', { class: 'bar-fill bar-hist', style: `width:${((count / max) * 100).toFixed(1)}%` }),
      ]),
      el('span', { class: 'bar-value' }, [String(count)]),
    ]),
  );
  return el('section', { class: 'histogram' }, [el('h3', {}, [title]), ...rows]);
}
