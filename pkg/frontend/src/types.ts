// Wire types mirroring the backend JSON contract exactly.

export interface ColumnDescriptor {
  name: string;
  unit: string;
  role: 'sampled' | 'derived' | 'outcome';
  /** Sampling bounds; null for columns that cannot be pinned. */
  min: number | null;
  max: number | null;
}

export interface ColumnSummary {
  name: string;
  unit: string;
  role: 'sampled' | 'derived' | 'outcome';
  min: number;
  max: number;
  mean: number;
  std: number;
}

export interface DatasetResponse {
  dataset_id: string;
  n: number;
  schema: ColumnDescriptor[];
  summary: ColumnSummary[];
  generated: boolean;
}

export interface GraphPayload {
  nodes: string[];
  directed: [string, string][];
  undirected: [string, string][];
}

export interface DiscoverResponse {
  graph_id: string;
  cpdag: GraphPayload;
  operator_log: OperatorRecord[];
  score_trajectory: number[];
}

export interface OperatorRecord {
  phase: 'forward' | 'backward';
  op: 'insert' | 'delete';
  source: string;
  target: string;
  subset: string[];
  gain: number;
}

export interface GraphResponse {
  graph_id: string;
  dataset_id: string;
  parent_id: string | null;
  created_by: string;
  graph: GraphPayload;
}

export interface ConstraintsPayload {
  required: [string, string][];
  forbidden: [string, string][];
  tiers: string[][];
}

export interface ConstraintsResponse {
  graph_id: string;
  graph: GraphPayload;
}

export interface PathDiagnostic {
  nodes: string[];
  roles: string[];
  blocked_given: string[];
  open: boolean;
  backdoor: boolean;
}

export interface EstimandPayload {
  treatment: string;
  outcome: string;
  null_effect: boolean;
  minimal_adjustment_sets: string[][];
  forbidden_nodes: string[];
  paths: PathDiagnostic[];
}

export interface IdentifyResponse {
  graph_id: string;
  estimand: EstimandPayload;
}

export interface ScenarioRequest {
  treatment: string;
  control: number;
  treat: number;
  outcome?: string;
  conditions: Record<string, number>;
  n_samples: number;
}

export interface EstimateRequest {
  scenario: ScenarioRequest;
  seed: number;
  expansion?: 'linear' | 'interactions2';
  include_baseline?: boolean;
  include_oracle?: boolean;
  oracle_samples?: number;
}

export interface HistogramPayload {
  counts: number[];
  bin_edges: number[];
}

export interface EffectPayload {
  tau: number;
  standard_error: number;
  n: number;
  scenario: {
    treatment: string;
    control: number;
    treat: number;
    outcome: string;
    conditions: Record<string, number>;
    n_samples: number;
  };
  histogram: HistogramPayload;
  cumulative: { value: number; fraction: number }[];
}

export interface EstimateResponse {
  graph_id: string;
  seed: number;
  estimate: EffectPayload;
  estimand: EstimandPayload;
  node_r_squared: Record<string, number>;
  baseline?: EffectPayload;
  oracle?: { mean: number; std: number; n: number };
}

export interface TimelineGraphEntry {
  graph_id: string;
  parent_id: string | null;
  created_by: string;
}

export interface TimelineQueryEntry {
  kind: 'identify' | 'estimate';
  graph_id: string;
  [key: string]: unknown;
}

export interface DatasetInfoResponse extends DatasetResponse {
  generator_args: { n: number; seed: number; noise: number } | null;
  graphs: TimelineGraphEntry[];
  queries: TimelineQueryEntry[];
}
