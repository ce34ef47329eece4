/**
 * Round-trip against a real service process: upload a pool, set targets,
 * run, and check that everything the UI displays equals what the service
 * wrote into report.csv. Needs python3 with the cohortselect package
 * installed; the server binds a loopback port derived from the pid.
 */

import { spawn, type ChildProcessWithoutNullStreams } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ServiceClient } from '../src/api';
import { AppController } from '../src/app';
import { buildComparison } from '../src/compare';
import { renderComparison, renderHistory } from '../src/render';
import type { RunEntry } from '../src/state';

const PORT = 18731 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

// Comma-free labels so report.csv rows split cleanly on ','.
const POOL_CSV = [
  'id,flag,stage',
  'p01,yes,new',
  'p02,yes,new',
  'p03,yes,mid',
  'p04,no,mid',
  'p05,no,mid',
  'p06,no,late',
  'p07,no,late',
  'p08,no,late',
  'p09,no,new',
  'p10,no,new',
  'p11,yes,late',
  'p12,no,mid',
  '',
].join('\n');

let proc: ChildProcessWithoutNullStreams;
let dataDir: string;
let stderrLog = '';

async function sleep(ms: number): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 45000;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/selections/does-not-exist`);
      if (response.status === 404) {
        return;
      }
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      throw new Error(`service never came up on ${BASE}\n${stderrLog}`);
    }
    await sleep(100);
  }
}

interface CsvRow {
  columnId: string;
  attribute: string;
  target: string;
  poolFraction: string;
  selectedFraction: string;
  deviation: string;
}

function parseReportCsv(text: string): CsvRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  const header = lines[0].split(',');
  expect(header).toEqual([
    'column_id',
    'source_attribute',
    'value_label',
    'target',
    'pool_fraction',
    'selected_fraction',
    'deviation',
  ]);
  return lines.slice(1).map((line) => {
    const fields = line.split(',');
    expect(fields).toHaveLength(7);
    return {
      columnId: fields[0],
      attribute: fields[1],
      target: fields[3],
      poolFraction: fields[4],
      selectedFraction: fields[5],
      deviation: fields[6],
    };
  });
}

/** Mean over attributes of the mean absolute per-column deviation. */
function distanceFromCsv(
  rows: CsvRow[],
  achieved: (row: CsvRow) => number,
): number {
  const byAttribute = new Map<string, number[]>();
  for (const row of rows) {
    const deviations = byAttribute.get(row.attribute) ?? [];
    deviations.push(Math.abs(achieved(row) - Number(row.target)));
    byAttribute.set(row.attribute, deviations);
  }
  let total = 0;
  for (const deviations of byAttribute.values()) {
    total += deviations.reduce((a, b) => a + b, 0) / deviations.length;
  }
  return total / byAttribute.size;
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), 'cohortselect-ui-'));
  const script =
    'from cohortselect.cli import main; raise SystemExit(main(' +
    `['serve', '--host', '127.0.0.1', '--port', '${PORT}', ` +
    `'--data-dir', ${JSON.stringify(dataDir)}]))`;
  proc = spawn('python3', ['-c', script], {
    env: { ...process.env, PYTHONUNBUFFERED: '1' },
  });
  proc.stderr.on('data', (chunk: Buffer) => {
    stderrLog += chunk.toString();
  });
  await waitForServer();
});

afterAll(async () => {
  if (proc && proc.exitCode === null) {
    proc.kill('SIGTERM');
    await new Promise((resolve) => proc.once('exit', resolve));
  }
  rmSync(dataDir, { recursive: true, force: true });
});

describe('UI round trip against the live service', () => {
  const client = () => new ServiceClient(BASE, fetch);
  let controller: AppController;
  let datasetId: string;
  let firstRun: RunEntry;

  it('uploads the pool and seeds a valid editor', async () => {
    controller = new AppController(client(), {
      initialDelayMs: 25,
      maxDelayMs: 200,
    });
    const info = await controller.uploadPool(POOL_CSV);
    datasetId = info.dataset_id;
    expect(info.n_candidates).toBe(12);
    const editor = controller.editor(datasetId);
    expect(editor.attributes.map((a) => a.name)).toEqual(['flag', 'stage']);
    expect(editor.validate()).toEqual([]);
    expect(controller.canSubmit(datasetId)).toBe(true);
  });

  it('a state the editor marks valid is accepted by the service', async () => {
    firstRun = await controller.runSelection(datasetId, {
      k: 6,
      alpha: 0.5,
      quantile: 0.9,
      trials: 4,
      seed: 11,
    });
    expect(firstRun.job.status).toBe('done');
    expect(firstRun.job.report).not.toBeNull();
    expect(firstRun.job.result?.selected).toHaveLength(6);
  });

  it('displays exactly the numbers report.csv carries', async () => {
    const csvText = await client().getReportCsv(firstRun.job.job_id);
    const csvRows = parseReportCsv(csvText);
    const model = buildComparison([firstRun.job]);

    const bars = new Map(
      model.groups.flatMap((g) => g.bars).map((b) => [b.columnId, b]),
    );
    expect(bars.size).toBe(csvRows.length);
    for (const row of csvRows) {
      const bar = bars.get(row.columnId);
      expect(bar, row.columnId).toBeDefined();
      expect(bar!.target).toBe(Number(row.target));
      expect(bar!.poolFraction).toBe(Number(row.poolFraction));
      expect(bar!.selectedFractions[0]).toBe(Number(row.selectedFraction));
    }

    const html = renderComparison(model);
    for (const row of csvRows) {
      expect(html).toContain(`data-fraction="${Number(row.selectedFraction)}"`);
      expect(html).toContain(`data-target="${Number(row.target)}"`);
    }

    const report = firstRun.job.report!;
    const dPool = report.pool_distance.overall;
    const dSelected = report.selected_distance.overall;
    expect(html).toContain(`d(S) = <span class="d-pool">${String(dPool)}</span>`);
    expect(html).toContain(
      `d(X) = <span class="d-selected">${String(dSelected)}</span>`,
    );
    const csvDPool = distanceFromCsv(csvRows, (r) => Number(r.poolFraction));
    const csvDSelected = distanceFromCsv(csvRows, (r) =>
      Number(r.selectedFraction),
    );
    expect(Math.abs(dPool - csvDPool)).toBeLessThan(1e-9);
    expect(Math.abs(dSelected - csvDSelected)).toBeLessThan(1e-9);
    for (const row of csvRows) {
      expect(
        Math.abs(Number(row.deviation) -
          Math.abs(Number(row.selectedFraction) - Number(row.target))),
      ).toBeLessThan(1e-12);
    }
  });

  it('adjusting one target and re-running appends to the history', async () => {
    const editor = controller.editor(datasetId);
    expect(editor.dirty).toBe(false);
    editor.setTarget('flag', 'yes', 0.25);
    expect(editor.dirty).toBe(true);
    expect(controller.canSubmit(datasetId)).toBe(true);

    const secondRun = await controller.runSelection(datasetId, {
      k: 6,
      alpha: 0.5,
      quantile: 0.9,
      trials: 4,
      seed: 12,
    });
    expect(controller.history.length).toBe(2);
    expect(controller.history.all[0]).toBe(firstRun);
    expect(controller.history.all[1]).toBe(secondRun);
    expect(firstRun.sequence).toBe(1);
    expect(secondRun.sequence).toBe(2);
    expect(firstRun.job.job_id).not.toBe(secondRun.job.job_id);

    const html = renderHistory(controller.history.all);
    expect(html).toContain(`data-job="${firstRun.job.job_id}"`);
    expect(html).toContain(`data-job="${secondRun.job.job_id}"`);
    expect(html).toContain('run 1');
    expect(html).toContain('run 2');

    const model = buildComparison([firstRun.job, secondRun.job]);
    expect(model.notice).toBeNull();
    for (const group of model.groups) {
      for (const bar of group.bars) {
        expect(bar.selectedFractions).toHaveLength(2);
      }
    }
  });
});
