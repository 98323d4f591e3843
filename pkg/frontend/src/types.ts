// Payload shapes of the decision-engine HTTP API. Field names mirror the
// wire format exactly; the UI performs no utility arithmetic of its own.

export type Decision = "deal" | "no_deal";

export interface TrajectoryRoundDoc {
  remaining: number[];
  offer?: number;
  decision?: Decision;
}

export interface TrajectoryDoc {
  contestant: string;
  currency: string;
  rounds: TrajectoryRoundDoc[];
}

export interface DatasetEntry {
  name: string;
  contestant: string;
  currency: string;
  rounds: number;
  trajectory: TrajectoryDoc;
}

export interface DatasetsResponse {
  datasets: DatasetEntry[];
}

export type BankerDescriptor =
  | { type: "expected_value" }
  | { type: "multipliers"; multipliers: number[]; extrapolation?: "hold_last" | "linear_trend" }
  | { type: "online"; fallback?: BankerDescriptor };

export type UtilityDescriptor =
  | { type: "log" }
  | { type: "crra"; gamma: number }
  | { type: "exp_power"; alpha: number; gamma: number; wealth?: number };

export interface SolveRequest {
  ladder: number[];
  remaining?: number[];
  schedule?: number[];
  banker?: BankerDescriptor;
  utility?: UtilityDescriptor;
  gamma_grid?: number[];
}

export interface SolveResult {
  offer: number;
  q_deal: number;
  q_nodeal: number;
  ce_nodeal: number;
  action: Decision;
  round: number;
}

export interface SolveResponse extends SolveResult {
  gamma_results?: (SolveResult & { gamma: number })[];
}

export interface ThresholdsRequest {
  ladder: number[];
  remaining?: number[];
  schedule?: number[];
  banker?: BankerDescriptor;
  gamma_range?: [number, number];
}

export interface ThresholdsResponse {
  gamma_range: [number, number];
  breakpoints: number[];
  actions: Decision[];
  child_breakpoints: number[];
  branch_crossings: { branch: [number, number]; crossing: number | null }[];
}

export interface InvertRequest {
  trajectory: TrajectoryDoc;
  banker?: BankerDescriptor;
  gamma_range?: [number, number];
  start_size?: number;
}

export interface InvertResponse {
  gamma_range: [number, number];
  analysis_start_round: number;
  per_round: {
    round: number;
    action: Decision;
    kind: "upper" | "lower" | "none" | "infeasible" | "set";
    value: number | null;
    feasible: [number, number][];
    breakpoints: number[];
  }[];
  intersection: [number, number][];
  upper_bound: number | null;
  infeasible_rounds: number[];
}

export interface BenefitResponse {
  benefit: number;
  offer: number;
  prizes: number[];
  gamma: number;
}

export interface ApiErrorBody {
  error: { code: string; message: string; round?: number };
}
