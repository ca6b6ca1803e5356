// Wire types mirroring the service's JSON schemas (api/v1).

export interface HyperSpec {
  mu_eta0: number;
  sigma2_eta0: number;
  alpha_eta: number;
  beta_eta: number;
  mu_gamma0: number;
  sigma2_gamma0: number;
  alpha_gamma: number;
  beta_gamma: number;
}

export interface SamplePlanSpec {
  stage1: number[];
  stage2_high: number[];
  stage2_low: number[];
}

export interface ConfigSpec {
  n_indications?: number;
  reference_rates: number[];
  target_rates: number[];
  thresholds: { s1: number; s2: number; t2: number; w2: number };
  tau2: number;
  hyper: HyperSpec;
  sample_plan: SamplePlanSpec;
}

export interface ScenarioTruth {
  null_indications: number[];
  active_indications: number[];
  scored: number[];
  correct_final: number[];
  poc_ok: number[][];
}

export interface ScenarioSpec {
  name: string;
  true_rates: [number[], number[]];
  truth?: ScenarioTruth;
}

export interface SettingsSpec {
  n_iterations?: number;
  burn_in?: number;
  thin?: number;
  adapt_window?: number;
  target_accept?: number;
  seed?: number;
}

export interface SimulationRequest {
  scenario: string | ScenarioSpec;
  config?: ConfigSpec;
  settings?: SettingsSpec;
  n_replicates: number;
  seed: number;
  n_workers?: number;
}

export interface OperatingCharacteristics {
  scenario: string;
  stage1_type1_fw: number | null;
  stage1_type2_fw: number | null;
  stage2_type1_fw: number | null;
  perfect: number | null;
  poc: number | null;
  do: number | null;
  by_indication_stage1_errors: (number | null)[];
  by_indication_error_kind: (string | null)[];
  avg_sample_size: number[];
  go_rate: number[];
  n_replicates: number;
  seed: number;
  config_digest: string;
}

export type JobStatus = 'queued' | 'running' | 'done' | 'failed';

export interface Job {
  id: string;
  status: JobStatus;
  progress: number;
  completed: number;
  total: number;
  result?: OperatingCharacteristics;
  error?: string;
}

export interface CalibrationTableRow {
  tau2: number;
  deltas: number[];
  feasible: boolean;
}

export interface CalibrationResult {
  tau2: number | null;
  feasible: boolean;
  delta: number;
  p2: number[];
  table: CalibrationTableRow[];
}

export interface CurvePoint {
  p2: number;
  delta: number;
}

export interface Curve {
  tau2: number;
  points: CurvePoint[];
}

export interface ArmCounts {
  responders: number;
  enrolled: number;
}

export interface TrialDataSpec {
  stage1: ArmCounts[];
  stage1_decisions?: number[];
  stage2?: ({ high: ArmCounts; low: ArmCounts } | null)[];
}

export interface ParamSummary {
  mean: number;
  sd: number;
  'q2.5': number;
  'q97.5': number;
  rhat: number | null;
  ess: number | null;
}

export interface DecisionRecord {
  go_stage1: number[];
  poc_high: (number | null)[];
  poc_low: (number | null)[];
  do_flag: (number | null)[];
  final: (number | null)[];
  posterior_probs: {
    go: (number | null)[];
    poc_high: (number | null)[];
    poc_low: (number | null)[];
    do: (number | null)[];
  };
  warnings: string[];
}

export interface AnalysisReport {
  stage: 'interim' | 'final';
  posterior_summaries: Record<string, ParamSummary>;
  decision_probs: DecisionRecord['posterior_probs'];
  decisions: DecisionRecord;
  derived_rates: Record<string, ParamSummary>;
}
