/** End-to-end console round-trip against the real matching service.
 *
 * Spawns the Python service with a generated dataset, drives the console
 * store over HTTP, and checks the shipping-level behaviours: threshold
 * sweeps never add rows, the distance slider clamps to [5, 50], and an
 * operator override lands in the audit log within one refresh.
 */

import { spawn, spawnSync, ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync } from 'node:fs';
import { createServer } from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { ConsoleStore } from '../src/store.js';
import { CandidateForm } from '../src/types.js';

const REPO_ROOT = join(__dirname, '..', '..');
const PYTHON = process.env.JOBMATCH_PYTHON ?? 'python3';

let workdir: string;
let server: ChildProcess | null = null;
let baseUrl: string;
let auditPath: string;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, '127.0.0.1', () => {
      const address = srv.address();
      if (address && typeof address === 'object') {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error('no port'));
      }
    });
  });
}

async function waitForHealth(url: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${url}/health`);
      if (resp.ok) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service at ${url} did not come up in ${timeoutMs} ms`);
}

function candidateForm(): CandidateForm {
  return {
    id: 'console-demo',
    lat: 45.4384,
    lon: 10.9916,
    education_level: 3,
    disability_type: 'motoria',
    attitude: 0.85,
    years_experience: 4,
    unemployment_months: 6,
    skills_text:
      'assemblaggio componenti, confezionamento prodotti, archiviazione documenti, ' +
      'inserimento dati, gestione magazzino, pulizia locali, controllo qualità, ' +
      'imballaggio merci, smistamento posta, reception accoglienza',
    exclusions: '',
  };
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), 'jobmatch-console-'));
  auditPath = join(workdir, 'audit.jsonl');

  const gen = spawnSync(
    PYTHON,
    [
      '-m', 'jobmatch.cli', 'generate',
      '--candidates', '40',
      '--companies', '40',
      '--seed', '5',
      '--outdir', workdir,
    ],
    { cwd: REPO_ROOT, encoding: 'utf-8' },
  );
  if (gen.status !== 0) {
    throw new Error(`dataset generation failed: ${gen.stderr}`);
  }

  const port = await freePort();
  baseUrl = `http://127.0.0.1:${port}`;
  server = spawn(
    PYTHON,
    [
      '-m', 'jobmatch.cli', 'serve',
      '--host', '127.0.0.1',
      '--port', String(port),
      '--candidates', join(workdir, 'candidates.csv'),
      '--companies', join(workdir, 'companies.csv'),
      '--audit-log', auditPath,
    ],
    { cwd: REPO_ROOT, stdio: ['ignore', 'pipe', 'pipe'] },
  );
  server.stderr?.on('data', () => undefined); // keep the pipe drained
  server.stdout?.on('data', () => undefined);
  await waitForHealth(baseUrl);
}, 60_000);

afterAll(() => {
  server?.kill('SIGTERM');
  rmSync(workdir, { recursive: true, force: true });
});

describe('console round-trip against the live service', () => {
  it(
    'raising attitude_min across 20 sweeps never adds entries',
    async () => {
      const store = new ConsoleStore(new ApiClient(baseUrl), 40, false);
      await store.loadConfig();
      const ok = await store.submitCandidate(candidateForm());
      expect(ok).toBe(true);
      expect(store.state.results).not.toBeNull();
      let previous = new Set(store.state.results!.map((r) => r.company_id));
      expect(previous.size).toBeGreaterThan(0);

      for (let step = 1; step <= 20; step += 1) {
        const attitudeMin = step * 0.05; // 0.05 .. 1.0 ascending
        await store.adjustThreshold('attitude_min', attitudeMin);
        expect(store.state.config?.attitude_min).toBeCloseTo(Math.min(1, attitudeMin), 10);
        expect(store.state.stale).toBe(false); // refreshed after each change
        const current = new Set(store.state.results!.map((r) => r.company_id));
        for (const id of current) {
          expect(previous.has(id), `company ${id} appeared after raising attitude_min`).toBe(true);
        }
        previous = current;
      }
      // the candidate sits at 0.85, so a 1.0 floor empties the list
      expect(store.state.results).toHaveLength(0);
    },
    60_000,
  );

  it(
    'distance slider clamps to [5, 50] before reaching the server',
    async () => {
      const store = new ConsoleStore(new ApiClient(baseUrl), 10, false);
      await store.loadConfig();
      await store.adjustThreshold('distance_max_km', 999);
      expect(store.state.config?.distance_max_km).toBe(50);
      await store.adjustThreshold('distance_max_km', 1);
      expect(store.state.config?.distance_max_km).toBe(5);
      await store.adjustThreshold('distance_max_km', 30);
      expect(store.state.config?.distance_max_km).toBe(30);
    },
    30_000,
  );

  it(
    'an override appears in the service audit log within one refresh',
    async () => {
      const store = new ConsoleStore(new ApiClient(baseUrl), 10, false);
      await store.loadConfig();
      await store.adjustThreshold('attitude_min', 0);
      await store.submitCandidate(candidateForm());
      const requestId = store.state.requestId;
      expect(requestId).toBeTruthy();

      const reason = 'il candidato ha già lavorato con questa azienda';
      const ok = await store.recordOverride('overridden', reason);
      expect(ok).toBe(true);
      expect(store.state.overrideConfirmation).toContain(requestId!);

      // same request id a second time surfaces the conflict verbatim
      const dup = await store.recordOverride('accepted', '');
      expect(dup).toBe(false);
      expect(store.state.toast).toMatch(/409/);

      await store.refresh(); // one refresh cycle
      const lines = readFileSync(auditPath, 'utf-8').trimEnd().split('\n').map((l) => JSON.parse(l));
      const overrideLine = lines.find(
        (l) => l.type === 'override' && l.request_id === requestId,
      );
      expect(overrideLine).toBeDefined();
      expect(overrideLine.operator_action.reason).toBe(reason);
    },
    30_000,
  );
});
