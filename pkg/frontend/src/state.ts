/**
 * Editor state for attribute targets and weights, plus the append-only run
 * history. Validation mirrors the service's schema rules so that any state
 * the editor marks valid is accepted by POST /selections.
 */

import type {
  AttributeSchema,
  ColumnSummary,
  DatasetInfo,
  JobRecord,
  SelectionParamsBody,
} from './types';

const TARGET_SUM_TOL = 1e-9;

export interface AttributeEditor {
  name: string;
  kind: 'categorical' | 'ordinal';
  /** Category labels, or bin-index keys ("0", "1", ...) for ordinals. */
  labels: string[];
  /** Slider-bound target fraction per label. */
  targets: Record<string, number>;
  weight: number;
  /** Bin edges, ordinals only. */
  edges?: number[];
}

export interface ValidationMessage {
  attribute: string;
  message: string;
}

function editorFromColumn(column: ColumnSummary): AttributeEditor | null {
  if (column.kind_guess === 'ordinal' && column.range) {
    const [lo, hi] = column.range;
    if (lo === hi) {
      return null; // constant column; nothing to target
    }
    const mid = (lo + hi) / 2;
    return {
      name: column.name,
      kind: 'ordinal',
      labels: ['0', '1'],
      targets: { '0': 0.5, '1': 0.5 },
      weight: 1.0,
      edges: [lo, mid, hi],
    };
  }
  if (column.distinct_values === 0 ||
      column.distinct_values > column.values.length) {
    return null; // empty or truncated value list; needs manual editing
  }
  const targets: Record<string, number> = {};
  const uniform =
    Math.floor((1 / column.values.length) * 10000) / 10000;
  for (const value of column.values) {
    targets[value] = uniform;
  }
  return {
    name: column.name,
    kind: 'categorical',
    labels: [...column.values],
    targets,
    weight: 1.0,
  };
}

export class TargetEditorState {
  readonly attributes: AttributeEditor[];
  private lastRun: string | null = null;

  constructor(attributes: AttributeEditor[]) {
    this.attributes = attributes;
  }

  /** Seed editors from an upload's column summary; uniform targets. */
  static fromDataset(info: DatasetInfo): TargetEditorState {
    const editors: AttributeEditor[] = [];
    for (const column of info.columns) {
      const editor = editorFromColumn(column);
      if (editor) {
        editors.push(editor);
      }
    }
    return new TargetEditorState(editors);
  }

  private editor(attribute: string): AttributeEditor {
    const found = this.attributes.find((a) => a.name === attribute);
    if (!found) {
      throw new Error(`no editor for attribute '${attribute}'`);
    }
    return found;
  }

  setTarget(attribute: string, label: string, fraction: number): void {
    const editor = this.editor(attribute);
    if (!editor.labels.includes(label)) {
      throw new Error(`attribute '${attribute}' has no label '${label}'`);
    }
    editor.targets[label] = fraction;
  }

  setWeight(attribute: string, weight: number): void {
    this.editor(attribute).weight = weight;
  }

  /** Mirror of the service's per-attribute schema checks. */
  validate(): ValidationMessage[] {
    const messages: ValidationMessage[] = [];
    const seen = new Set<string>();
    for (const editor of this.attributes) {
      if (seen.has(editor.name)) {
        messages.push({
          attribute: editor.name,
          message: 'duplicate attribute name',
        });
      }
      seen.add(editor.name);
      if (editor.weight < 0) {
        messages.push({ attribute: editor.name, message: 'negative weight' });
      }
      if (new Set(editor.labels).size !== editor.labels.length) {
        messages.push({
          attribute: editor.name,
          message: 'duplicate labels',
        });
      }
      if (editor.kind === 'categorical' && editor.labels.length === 0) {
        messages.push({
          attribute: editor.name,
          message: 'no categories declared',
        });
      }
      if (editor.kind === 'ordinal') {
        const edges = editor.edges ?? [];
        if (edges.length < 2) {
          messages.push({
            attribute: editor.name,
            message: 'ordinal needs at least two bin edges',
          });
        } else if (edges.some((e, i) => i > 0 && e <= edges[i - 1])) {
          messages.push({
            attribute: editor.name,
            message: 'bin edges must be strictly increasing',
          });
        }
      }
      let sum = 0;
      for (const label of Object.keys(editor.targets)) {
        if (!editor.labels.includes(label)) {
          messages.push({
            attribute: editor.name,
            message: `target for unknown label '${label}'`,
          });
        }
        const fraction = editor.targets[label];
        if (fraction < 0 || fraction > 1) {
          messages.push({
            attribute: editor.name,
            message: `target for '${label}' outside [0, 1]`,
          });
        }
        sum += fraction;
      }
      if (sum > 1 + TARGET_SUM_TOL) {
        messages.push({
          attribute: editor.name,
          message: `targets sum to ${sum.toFixed(4)} > 1`,
        });
      }
    }
    return messages;
  }

  isValid(): boolean {
    return this.validate().length === 0;
  }

  /** Request schema for POST /selections. */
  toSchema(): AttributeSchema[] {
    return this.attributes.map((editor) => {
      const schema: AttributeSchema = {
        name: editor.name,
        kind: editor.kind,
        weight: editor.weight,
        targets: { ...editor.targets },
      };
      if (editor.kind === 'categorical') {
        schema.categories = [...editor.labels];
      } else {
        schema.edges = editor.edges ? [...editor.edges] : undefined;
      }
      return schema;
    });
  }

  /** Record the schema a run was launched with; clears the dirty flag. */
  markRun(): void {
    this.lastRun = JSON.stringify(this.toSchema());
  }

  /** True when targets/weights changed since the last launched run. */
  get dirty(): boolean {
    if (this.lastRun === null) {
      return true;
    }
    return JSON.stringify(this.toSchema()) !== this.lastRun;
  }
}

export interface RunEntry {
  /** 1-based position in the history; stable for labeling. */
  sequence: number;
  job: JobRecord;
  schema: AttributeSchema[];
  params: SelectionParamsBody;
}

/** Append-only record of finished runs; entries are never replaced. */
export class RunHistory {
  private readonly entries: RunEntry[] = [];

  add(
    job: JobRecord,
    schema: AttributeSchema[],
    params: SelectionParamsBody,
  ): RunEntry {
    const entry: RunEntry = {
      sequence: this.entries.length + 1,
      job,
      schema,
      params,
    };
    this.entries.push(Object.freeze(entry));
    return entry;
  }

  get all(): readonly RunEntry[] {
    return [...this.entries];
  }

  get length(): number {
    return this.entries.length;
  }
}
