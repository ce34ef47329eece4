import { describe, expect, it } from 'vitest';

import { RunHistory, TargetEditorState } from '../src/state';
import type { DatasetInfo, JobRecord } from '../src/types';

const DATASET: DatasetInfo = {
  dataset_id: 'd1',
  n_candidates: 8,
  id_column: null,
  columns: [
    {
      name: 'gender',
      kind_guess: 'categorical',
      missing: 0,
      distinct_values: 2,
      values: ['f', 'm'],
    },
    {
      name: 'age',
      kind_guess: 'ordinal',
      missing: 0,
      distinct_values: 7,
      values: ['19', '21', '25', '29', '33', '41', '58'],
      range: [19, 58],
    },
    {
      name: 'notes',
      kind_guess: 'categorical',
      missing: 1,
      distinct_values: 30,
      values: ['only-a-few-shown'],
    },
  ],
};

function editorFixture(): TargetEditorState {
  return new TargetEditorState([
    {
      name: 'gender',
      kind: 'categorical',
      labels: ['f', 'm'],
      targets: { f: 0.5, m: 0.5 },
      weight: 1,
    },
  ]);
}

describe('TargetEditorState.fromDataset', () => {
  it('seeds categorical and ordinal editors, skips truncated columns', () => {
    const state = TargetEditorState.fromDataset(DATASET);
    expect(state.attributes.map((a) => a.name)).toEqual(['gender', 'age']);
    const gender = state.attributes[0];
    expect(gender.kind).toBe('categorical');
    expect(gender.labels).toEqual(['f', 'm']);
    const age = state.attributes[1];
    expect(age.kind).toBe('ordinal');
    expect(age.edges).toEqual([19, 38.5, 58]);
  });

  it('seeded state is valid and target sums stay at most 1', () => {
    const state = TargetEditorState.fromDataset(DATASET);
    expect(state.validate()).toEqual([]);
    for (const attribute of state.attributes) {
      const sum = Object.values(attribute.targets).reduce((a, b) => a + b, 0);
      expect(sum).toBeLessThanOrEqual(1);
    }
  });
});

describe('validation mirrors the service rules', () => {
  it('accepts a clean state', () => {
    expect(editorFixture().validate()).toEqual([]);
  });

  it('flags a target sum above 1 naming the attribute', () => {
    const state = editorFixture();
    state.setTarget('gender', 'f', 0.7);
    const messages = state.validate();
    expect(messages).toHaveLength(1);
    expect(messages[0].attribute).toBe('gender');
    expect(messages[0].message).toContain('sum');
  });

  it('flags out-of-range fractions and negative weights', () => {
    const state = editorFixture();
    state.setTarget('gender', 'f', -0.2);
    state.setWeight('gender', -1);
    const messages = state.validate().map((m) => m.message);
    expect(messages.some((m) => m.includes('outside [0, 1]'))).toBe(true);
    expect(messages.some((m) => m.includes('negative weight'))).toBe(true);
  });

  it('flags unknown target labels and non-increasing edges', () => {
    const state = new TargetEditorState([
      {
        name: 'age',
        kind: 'ordinal',
        labels: ['0', '1'],
        targets: { '0': 0.5, ghost: 0.5 },
        weight: 1,
        edges: [10, 10, 20],
      },
    ]);
    const messages = state.validate().map((m) => m.message);
    expect(messages.some((m) => m.includes("unknown label 'ghost'"))).toBe(
      true,
    );
    expect(messages.some((m) => m.includes('strictly increasing'))).toBe(true);
  });

  it('rejects setTarget on labels that do not exist', () => {
    expect(() => editorFixture().setTarget('gender', 'x', 0.5)).toThrow(
      "no label 'x'",
    );
  });
});

describe('dirty flag', () => {
  it('starts dirty, clears on markRun, returns on edit', () => {
    const state = editorFixture();
    expect(state.dirty).toBe(true);
    state.markRun();
    expect(state.dirty).toBe(false);
    state.setTarget('gender', 'f', 0.4);
    expect(state.dirty).toBe(true);
    state.setTarget('gender', 'f', 0.5);
    expect(state.dirty).toBe(false);
  });
});

describe('toSchema', () => {
  it('produces the request shape the service expects', () => {
    const schema = editorFixture().toSchema();
    expect(schema).toEqual([
      {
        name: 'gender',
        kind: 'categorical',
        weight: 1,
        categories: ['f', 'm'],
        targets: { f: 0.5, m: 0.5 },
      },
    ]);
  });

  it('copies, never aliases, the editor state', () => {
    const state = editorFixture();
    const schema = state.toSchema();
    schema[0].targets.f = 0.9;
    expect(state.attributes[0].targets.f).toBe(0.5);
  });
});

function fakeJob(jobId: string): JobRecord {
  return {
    job_id: jobId,
    dataset_id: 'd1',
    status: 'done',
    params: {
      k: 4,
      alpha: 0.5,
      quantile: 1,
      trials: 1,
      seed: 1,
      pre_selected: [],
    },
    schema: [],
    result: null,
    report: null,
    error: null,
  };
}

describe('RunHistory', () => {
  it('appends and never replaces', () => {
    const history = new RunHistory();
    const first = history.add(fakeJob('a'), [], { k: 4 });
    const second = history.add(fakeJob('b'), [], { k: 5 });
    expect(history.length).toBe(2);
    expect(history.all[0]).toBe(first);
    expect(history.all[1]).toBe(second);
    expect(first.sequence).toBe(1);
    expect(second.sequence).toBe(2);
  });

  it('entries are frozen and the list copy is safe to mutate', () => {
    const history = new RunHistory();
    history.add(fakeJob('a'), [], { k: 4 });
    const copy = [...history.all];
    copy.pop();
    expect(history.length).toBe(1);
    expect(Object.isFrozen(history.all[0])).toBe(true);
  });
});
