/**
 * HTML renderers for the comparison view, the validation panel, and the
 * run history list. Pure string builders so they are testable without a
 * browser; d values are rendered with String() so the page shows exactly
 * what the service sent.
 */

import type { ComparisonModel } from './compare';
import type { ValidationMessage, RunEntry } from './state';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

function barSpan(kind: string, fraction: number, title: string): string {
  const width = (fraction * 100).toFixed(1);
  return (
    `<span class="bar ${kind}" style="width:${width}%" ` +
    `title="${escapeHtml(title)}" data-fraction="${String(fraction)}"></span>`
  );
}

/** Grouped bars per attribute: pool, per-run selected, target marker. */
export function renderComparison(model: ComparisonModel): string {
  const parts: string[] = ['<div class="comparison">'];
  if (model.notice) {
    parts.push(`<p class="notice">${escapeHtml(model.notice)}</p>`);
  }
  parts.push('<ul class="distances">');
  for (const run of model.distances) {
    parts.push(
      `<li>${escapeHtml(run.label)}: ` +
        `d(S) = <span class="d-pool">${String(run.dPool)}</span>, ` +
        `d(X) = <span class="d-selected">${String(run.dSelected)}</span></li>`,
    );
  }
  parts.push('</ul>');
  for (const group of model.groups) {
    parts.push(`<section><h3>${escapeHtml(group.attribute)}</h3><table>`);
    for (const bar of group.bars) {
      const cells = [
        barSpan('pool', bar.poolFraction, 'input pool'),
        ...bar.selectedFractions.map((fraction, i) =>
          barSpan(`selected run-${i + 1}`, fraction, `selected, run ${i + 1}`),
        ),
      ];
      const marker =
        `<span class="target-marker" ` +
        `style="left:${(bar.target * 100).toFixed(1)}%" ` +
        `data-target="${String(bar.target)}"></span>`;
      parts.push(
        `<tr><th>${escapeHtml(bar.valueLabel)}</th>` +
          `<td class="bars">${cells.join('')}${marker}</td></tr>`,
      );
    }
    parts.push('</table></section>');
  }
  parts.push('</div>');
  return parts.join('');
}

export function renderValidation(messages: ValidationMessage[]): string {
  if (messages.length === 0) {
    return '<p class="valid">targets are valid</p>';
  }
  const items = messages
    .map(
      (m) =>
        `<li><strong>${escapeHtml(m.attribute)}</strong>: ` +
        `${escapeHtml(m.message)}</li>`,
    )
    .join('');
  return `<ul class="invalid">${items}</ul>`;
}

export function renderHistory(entries: readonly RunEntry[]): string {
  const items = entries
    .map((entry) => {
      const d = entry.job.report?.selected_distance.overall;
      return (
        `<li data-job="${escapeHtml(entry.job.job_id)}">` +
        `run ${entry.sequence}: k=${entry.params.k}, ` +
        `d(X) = ${d === undefined ? 'n/a' : String(d)}</li>`
      );
    })
    .join('');
  return `<ol class="history">${items}</ol>`;
}
