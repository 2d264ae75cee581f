/** Wire types mirroring the analysis service's JSON payloads. */

export interface TrialRef {
  group: string;
  patient_id: string;
  trial_id: string;
}

export type Side = "left" | "right";
export type CycleSel = "first" | "all" | number;
export type GroupId = "a" | "b";

export interface TrialCurve {
  ref: TrialRef;
  side: string;
  cycle_index: number;
  variable: string;
  values: number[];
}

export interface GroupEnsemble {
  n: number;
  alpha: number;
  mean: number[];
  ci_low: number[];
  ci_high: number[];
  per_trial: TrialCurve[];
}

export interface EnsemblePayload {
  variable: string;
  side: string;
  points: number;
  group_a: GroupEnsemble | null;
  group_b: GroupEnsemble | null;
}

export interface BoxJson {
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  whisker_low: number;
  whisker_high: number;
  outliers: { ref: TrialRef | null; value: number }[];
}

export interface RadarAxisJson {
  parameter: string;
  mean_a: number | null;
  mean_b: number | null;
  axis_min: number;
  axis_max: number;
  normalized_a: number | null;
  normalized_b: number | null;
}

export interface TrialParams {
  ref: TrialRef;
  params: Record<string, number | null>;
}

export interface SpatioPayload {
  parameters: string[];
  box: Record<string, { a: BoxJson | null; b: BoxJson | null }>;
  radar: { axes: RadarAxisJson[] };
  per_trial: { a: TrialParams[]; b: TrialParams[] };
}

export interface CycleWindow {
  t_start: number;
  t_end: number;
}

export interface Hierarchy {
  [group: string]: { [patient: string]: string[] };
}

export interface EnsembleRequest {
  trials_a: TrialRef[];
  trials_b: TrialRef[];
  variable: string;
  side: Side;
  cycle: CycleSel;
  points?: number;
  alpha?: number;
}
