/** Payload types for the /api/v1 JSON contract. */

export interface ModelForm {
  intercepts: "fixed" | "random";
  slopes: "common" | "random";
}

export interface Residual {
  variance: number;
  structure: "independent" | "exchangeable" | "ar1";
  correlation: number;
}

export interface RandomEffects {
  var_intercept: number;
  var_slope: number;
  cov_intercept_slope: number;
}

export interface Requirement {
  alpha: number;
  beta: number;
  delta_min: number;
}

export interface Scheme {
  kind: "alternating" | "pairwise" | "restricted" | "unrestricted" | "manual";
  sequences?: number[][];
}

export interface ParameterSet {
  model: ModelForm;
  residual: Residual;
  random_effects: RandomEffects;
  requirement: Requirement;
  scheme: Scheme;
}

export type Axis = "participants" | "measurements_per_participant";

export interface DesignRow {
  I: number;
  J: number;
  K: number;
  L: number;
  total: number;
  se_pop: number;
  power: number | null;
  naive_min: number | null;
  naive_mean: number | null;
  naive_max: number | null;
  shrunk_fixed: number | null;
  shrunk_random: number | null;
  optimized: boolean;
  naive_se: (number | null)[];
  shrunken_fixed_se: number[] | null;
  shrunken_random_se: number[] | null;
  sequences: number[][];
}

export interface CurvePoint {
  x: number;
  y_min: number;
  y_mean: number;
  y_max: number;
  designs: DesignRow[];
}

export interface OptimizedSearchResponse {
  parameters: Record<string, unknown>;
  axis: Axis;
  points: CurvePoint[];
}

export interface SeriesPoint {
  x: number;
  y_min: number;
  y_mean: number;
  y_max: number;
}

export interface IndividualSe {
  grouping: string;
  series: Record<string, SeriesPoint[]>;
}

export interface DesignsResponse {
  parameters: Record<string, unknown>;
  participants: number | null;
  measurements: number | null;
  designs: DesignRow[];
  individual_se: IndividualSe | null;
}

export interface ApiError {
  code: string;
  message: string;
  field?: string | null;
  line?: number;
}
