/**
 * Service payload types, mirroring the JSON bodies in docs/openapi.json.
 * Field names match the wire format exactly (snake_case).
 */

export interface ColumnSummary {
  name: string;
  kind_guess: 'categorical' | 'ordinal';
  missing: number;
  distinct_values: number;
  values: string[];
  range?: [number, number];
}

export interface DatasetInfo {
  dataset_id: string;
  n_candidates: number;
  id_column: string | null;
  columns: ColumnSummary[];
}

export interface AttributeSchema {
  name: string;
  kind: 'categorical' | 'ordinal' | 'joint';
  weight?: number;
  categories?: string[];
  bins?: number;
  edges?: number[];
  components?: string[];
  targets: Record<string, number>;
}

export interface SelectionParamsBody {
  k: number;
  alpha?: number;
  quantile?: number;
  trials?: number;
  seed?: number;
  pre_selected?: string[];
}

export interface PerColumnScore {
  column_id: string;
  count: number;
  saturation: number;
}

export interface SelectionResultBody {
  selected: string[];
  score: { value: number; per_column: PerColumnScore[] };
  trial_index: number;
  per_trial_scores: number[];
  seed_used: number;
  params: Required<Omit<SelectionParamsBody, 'pre_selected'>> & {
    pre_selected: string[];
  };
}

export interface DistanceReportBody {
  overall: number;
  per_attribute: Record<string, number>;
  per_column: Record<
    string,
    { achieved: number; target: number; deviation: number }
  >;
  set_size: number;
}

export interface ReportRow {
  column_id: string;
  source_attribute: string;
  value_label: string;
  target: number;
  pool_fraction: number;
  selected_fraction: number;
  deviation: number;
}

export interface ReportBody {
  rows: ReportRow[];
  selected_distance: DistanceReportBody;
  pool_distance: DistanceReportBody;
}

export type JobStatus = 'pending' | 'running' | 'done' | 'failed';

export interface JobRecord {
  job_id: string;
  dataset_id: string;
  status: JobStatus;
  params: SelectionResultBody['params'];
  schema: AttributeSchema[];
  result: SelectionResultBody | null;
  report: ReportBody | null;
  error: string | null;
}
