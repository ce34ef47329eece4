/**
 * Builds the side-by-side comparison model from finished job payloads.
 * All numbers are copied verbatim from the service; nothing is recomputed
 * client-side.
 */

import type { JobRecord, ReportRow } from './types';

export interface ComparisonBar {
  columnId: string;
  valueLabel: string;
  poolFraction: number;
  target: number;
  /** One selected fraction per run, in run order. */
  selectedFractions: number[];
}

export interface ComparisonGroup {
  attribute: string;
  bars: ComparisonBar[];
}

export interface RunDistances {
  label: string;
  dPool: number;
  dSelected: number;
}

export interface ComparisonModel {
  groups: ComparisonGroup[];
  distances: RunDistances[];
  /** Set when the runs' schemas differ; names what was left out. */
  notice: string | null;
}

function doneRows(job: JobRecord): ReportRow[] {
  if (job.status !== 'done' || !job.report) {
    throw new Error(`job ${job.job_id} is not done`);
  }
  return job.report.rows;
}

/**
 * Compare one or two finished runs. With differing schemas the comparison
 * is limited to shared columns and a notice lists the rest.
 */
export function buildComparison(
  runs: JobRecord[],
  labels?: string[],
): ComparisonModel {
  if (runs.length === 0) {
    throw new Error('nothing to compare');
  }
  const rowsPerRun = runs.map(doneRows);
  const shared = rowsPerRun
    .map((rows) => new Set(rows.map((r) => r.column_id)))
    .reduce((a, b) => new Set([...a].filter((id) => b.has(id))));
  const dropped = new Set<string>();
  for (const rows of rowsPerRun) {
    for (const row of rows) {
      if (!shared.has(row.column_id)) {
        dropped.add(row.column_id);
      }
    }
  }

  const groups: ComparisonGroup[] = [];
  for (const row of rowsPerRun[0]) {
    if (!shared.has(row.column_id)) {
      continue;
    }
    let group = groups.find((g) => g.attribute === row.source_attribute);
    if (!group) {
      group = { attribute: row.source_attribute, bars: [] };
      groups.push(group);
    }
    group.bars.push({
      columnId: row.column_id,
      valueLabel: row.value_label,
      poolFraction: row.pool_fraction,
      target: row.target,
      selectedFractions: rowsPerRun.map((rows) => {
        const match = rows.find((r) => r.column_id === row.column_id);
        return match!.selected_fraction;
      }),
    });
  }

  const distances = runs.map((job, i) => ({
    label: labels?.[i] ?? `run ${i + 1}`,
    dPool: job.report!.pool_distance.overall,
    dSelected: job.report!.selected_distance.overall,
  }));

  return {
    groups,
    distances,
    notice: dropped.size
      ? `schemas differ; comparison limited to shared columns ` +
        `(left out: ${[...dropped].sort().join(', ')})`
      : null,
  };
}
