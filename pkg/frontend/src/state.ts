/** Explorer state: form values, selections and fetched payloads.
 *
 * Downstream panels depend on upstream selections: the curve (b) feeds the
 * first click (c,d), which feeds the second click (e).  Any upstream change
 * clears everything below it, and the whole exploration is encoded in the URL
 * query string so views are shareable.
 */

import type {
  Axis,
  DesignsResponse,
  OptimizedSearchResponse,
  ParameterSet,
} from "./types.js";

export interface FormValues {
  alpha: number;
  beta: number;
  delta_min: number;
  intercepts: "fixed" | "random";
  slopes: "common" | "random";
  variance: number;
  structure: "independent" | "exchangeable" | "ar1";
  correlation: number;
  var_intercept: number;
  var_slope: number;
  cov_intercept_slope: number;
  scheme: "alternating" | "pairwise" | "manual";
  manual_text: string;
  design_option: "total_vs_participants" | "total_vs_measurements";
  include_individual: boolean;
  optimize_y_only: boolean;
  range_lo: number;
  range_hi: number;
}

/** Worked-example defaults shown on first load. */
export function defaultForm(): FormValues {
  return {
    alpha: 0.05,
    beta: 0.2,
    delta_min: 1.0,
    intercepts: "fixed",
    slopes: "random",
    variance: 4.0,
    structure: "ar1",
    correlation: 0.4,
    var_intercept: 4.0,
    var_slope: 1.0,
    cov_intercept_slope: 1.0,
    scheme: "pairwise",
    manual_text: "",
    design_option: "total_vs_participants",
    include_individual: true,
    optimize_y_only: false,
    range_lo: 2,
    range_hi: 64,
  };
}

export type FieldErrors = Partial<Record<keyof FormValues, string>>;

/** Client-side validation mirroring the server's parameter domains. */
export function validateForm(form: FormValues): FieldErrors {
  const errors: FieldErrors = {};
  const inOpen01 = (x: number) => x > 0 && x < 1;
  if (!inOpen01(form.alpha)) errors.alpha = "must be in (0, 1)";
  if (!inOpen01(form.beta)) errors.beta = "must be in (0, 1)";
  if (inOpen01(form.alpha) && inOpen01(form.beta) && form.alpha + form.beta >= 1) {
    errors.beta = "alpha + beta must be < 1";
  }
  if (!(form.delta_min !== 0) || !isFinite(form.delta_min)) {
    errors.delta_min = "must be nonzero";
  }
  if (!(form.variance > 0)) errors.variance = "must be > 0";
  if (!(Math.abs(form.correlation) < 1)) errors.correlation = "must satisfy |rho| < 1";
  if (form.structure === "exchangeable" && form.correlation < 0) {
    errors.correlation = "exchangeable correlation must be >= 0";
  }
  if (!(form.var_intercept >= 0)) errors.var_intercept = "must be >= 0";
  if (!(form.var_slope >= 0)) errors.var_slope = "must be >= 0";
  if (form.cov_intercept_slope ** 2 > form.var_intercept * form.var_slope) {
    errors.cov_intercept_slope = "covariance^2 must not exceed var_intercept * var_slope";
  }
  if (form.scheme === "manual" && !form.manual_text.trim()) {
    errors.manual_text = "provide at least one sequence";
  }
  if (!(form.range_lo >= 1) || !(form.range_hi >= form.range_lo)) {
    errors.range_hi = "need 1 <= lo <= hi";
  }
  return errors;
}

export function parseManualSequences(text: string): number[][] {
  return text
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0)
    .map((line) => line.split(",").map((tok) => Number(tok.trim())));
}

export function toParameterSet(form: FormValues): ParameterSet {
  return {
    model: { intercepts: form.intercepts, slopes: form.slopes },
    residual: {
      variance: form.variance,
      structure: form.structure,
      correlation: form.correlation,
    },
    random_effects: {
      var_intercept: form.var_intercept,
      var_slope: form.var_slope,
      cov_intercept_slope: form.cov_intercept_slope,
    },
    requirement: {
      alpha: form.alpha,
      beta: form.beta,
      delta_min: form.delta_min,
    },
    scheme:
      form.scheme === "manual"
        ? { kind: "manual", sequences: parseManualSequences(form.manual_text) }
        : { kind: form.scheme },
  };
}

export function curveAxis(form: FormValues): Axis {
  return form.design_option === "total_vs_participants"
    ? "participants"
    : "measurements_per_participant";
}

export interface ExplorerState {
  form: FormValues;
  curve: OptimizedSearchResponse | null;
  /** x clicked on the trade-off plot (panel b). */
  primarySelection: number | null;
  primaryPayload: DesignsResponse | null;
  /** x clicked on the SE plot (panel d). */
  secondarySelection: number | null;
  secondaryPayload: DesignsResponse | null;
  error: string | null;
}

type Listener = (state: ExplorerState) => void;

export class Store {
  private state: ExplorerState = {
    form: defaultForm(),
    curve: null,
    primarySelection: null,
    primaryPayload: null,
    secondarySelection: null,
    secondaryPayload: null,
    error: null,
  };
  private listeners: Listener[] = [];

  get(): ExplorerState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  setForm(form: FormValues): void {
    // form edits invalidate every fetched panel
    this.state = {
      form,
      curve: null,
      primarySelection: null,
      primaryPayload: null,
      secondarySelection: null,
      secondaryPayload: null,
      error: null,
    };
    this.emit();
  }

  setError(message: string | null): void {
    this.state = { ...this.state, error: message };
    this.emit();
  }

  setCurve(curve: OptimizedSearchResponse | null): void {
    this.state = {
      ...this.state,
      curve,
      primarySelection: null,
      primaryPayload: null,
      secondarySelection: null,
      secondaryPayload: null,
      error: null,
    };
    this.emit();
  }

  selectPrimary(x: number | null): void {
    this.state = {
      ...this.state,
      primarySelection: x,
      primaryPayload: null,
      secondarySelection: null,
      secondaryPayload: null,
    };
    this.emit();
  }

  setPrimaryPayload(payload: DesignsResponse): void {
    this.state = { ...this.state, primaryPayload: payload };
    this.emit();
  }

  selectSecondary(x: number | null): void {
    this.state = {
      ...this.state,
      secondarySelection: x,
      secondaryPayload: null,
    };
    this.emit();
  }

  setSecondaryPayload(payload: DesignsResponse): void {
    this.state = { ...this.state, secondaryPayload: payload };
    this.emit();
  }
}

const URL_FIELDS: (keyof FormValues)[] = [
  "alpha", "beta", "delta_min", "intercepts", "slopes", "variance",
  "structure", "correlation", "var_intercept", "var_slope",
  "cov_intercept_slope", "scheme", "design_option", "include_individual",
  "optimize_y_only", "range_lo", "range_hi",
];

/** Encode the exploration (form + selections) as a query string. */
export function encodeQuery(state: ExplorerState): string {
  const defaults = defaultForm() as unknown as Record<string, unknown>;
  const form = state.form as unknown as Record<string, unknown>;
  const params = new URLSearchParams();
  for (const key of URL_FIELDS) {
    if (form[key] !== defaults[key]) params.set(key, String(form[key]));
  }
  if (state.form.scheme === "manual" && state.form.manual_text.trim()) {
    params.set("sequences", state.form.manual_text.trim().split(/\r?\n/).join(";"));
  }
  if (state.primarySelection !== null) params.set("x1", String(state.primarySelection));
  if (state.secondarySelection !== null) params.set("x2", String(state.secondarySelection));
  return params.toString();
}

export interface DecodedQuery {
  form: FormValues;
  primarySelection: number | null;
  secondarySelection: number | null;
}

export function decodeQuery(query: string): DecodedQuery {
  const params = new URLSearchParams(query);
  const form = defaultForm();
  const numeric: (keyof FormValues)[] = [
    "alpha", "beta", "delta_min", "variance", "correlation", "var_intercept",
    "var_slope", "cov_intercept_slope", "range_lo", "range_hi",
  ];
  for (const key of numeric) {
    const raw = params.get(key);
    if (raw !== null && raw !== "" && !Number.isNaN(Number(raw))) {
      (form as unknown as Record<string, unknown>)[key] = Number(raw);
    }
  }
  const strings: (keyof FormValues)[] = [
    "intercepts", "slopes", "structure", "scheme", "design_option",
  ];
  for (const key of strings) {
    const raw = params.get(key);
    if (raw !== null) (form as unknown as Record<string, unknown>)[key] = raw;
  }
  for (const key of ["include_individual", "optimize_y_only"] as const) {
    const raw = params.get(key);
    if (raw !== null) form[key] = raw === "true";
  }
  const sequences = params.get("sequences");
  if (sequences) form.manual_text = sequences.split(";").join("\n");
  const x1 = params.get("x1");
  const x2 = params.get("x2");
  return {
    form,
    primarySelection: x1 !== null ? Number(x1) : null,
    secondarySelection: x2 !== null ? Number(x2) : null,
  };
}
