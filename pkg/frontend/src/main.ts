/**
 * Browser entry point: wires the controller to the page. All numbers shown
 * come from service payloads; this file only moves them into the DOM.
 */

import { ServiceClient } from './api';
import { AppController } from './app';
import { buildComparison } from './compare';
import { renderComparison, renderHistory, renderValidation } from './render';

// The page is served statically; ?api=... points it at the service.
const apiBase =
  new URLSearchParams(window.location.search).get('api') ??
  'http://127.0.0.1:8000';
const client = new ServiceClient(apiBase);
const controller = new AppController(client);

let datasetId: string | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function refreshEditor(): void {
  if (!datasetId) {
    return;
  }
  const editor = controller.editor(datasetId);
  const panel = el<HTMLDivElement>('targets');
  panel.innerHTML = '';
  for (const attribute of editor.attributes) {
    const section = document.createElement('section');
    const heading = document.createElement('h3');
    heading.textContent = `${attribute.name} (weight ${attribute.weight})`;
    section.appendChild(heading);
    for (const label of attribute.labels) {
      const row = document.createElement('label');
      row.textContent = `${label}: `;
      const slider = document.createElement('input');
      slider.type = 'range';
      slider.min = '0';
      slider.max = '1';
      slider.step = '0.01';
      slider.value = String(attribute.targets[label] ?? 0);
      const readout = document.createElement('span');
      readout.textContent = slider.value;
      slider.addEventListener('input', () => {
        editor.setTarget(attribute.name, label, Number(slider.value));
        readout.textContent = slider.value;
        el('validation').innerHTML = renderValidation(editor.validate());
        el('run').toggleAttribute('disabled', !controller.canSubmit(datasetId!));
      });
      row.appendChild(slider);
      row.appendChild(readout);
      section.appendChild(row);
    }
    panel.appendChild(section);
  }
  el('validation').innerHTML = renderValidation(editor.validate());
}

function refreshHistory(): void {
  el('history').innerHTML = renderHistory(controller.history.all);
  const runs = controller.history.all;
  if (runs.length > 0) {
    const latest = runs.slice(-2);
    const model = buildComparison(
      latest.map((entry) => entry.job),
      latest.map((entry) => `run ${entry.sequence}`),
    );
    el('comparison').innerHTML = renderComparison(model);
  }
}

el<HTMLInputElement>('pool-file').addEventListener('change', async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) {
    return;
  }
  const info = await controller.uploadPool(await file.text());
  datasetId = info.dataset_id;
  el('dataset-info').textContent =
    `${info.n_candidates} candidates, ${info.columns.length} columns ` +
    `(dataset ${info.dataset_id.slice(0, 12)})`;
  refreshEditor();
});

el<HTMLButtonElement>('run').addEventListener('click', async () => {
  if (!datasetId || !controller.canSubmit(datasetId)) {
    return;
  }
  const k = Number(el<HTMLInputElement>('cohort-size').value);
  const seedText = el<HTMLInputElement>('seed').value;
  const preSelected = el<HTMLTextAreaElement>('pre-selected')
    .value.split(/\s+/)
    .filter((id) => id.length > 0);
  const button = el<HTMLButtonElement>('run');
  button.disabled = true;
  try {
    await controller.runSelection(datasetId, {
      k,
      trials: 15,
      seed: seedText ? Number(seedText) : undefined,
      pre_selected: preSelected,
    });
    refreshHistory();
  } catch (error) {
    el('validation').textContent = String(error);
  } finally {
    button.disabled = false;
  }
});
