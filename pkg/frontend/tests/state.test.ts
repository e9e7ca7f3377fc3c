import { describe, expect, it } from "vitest";

import {
  Store,
  curveAxis,
  decodeQuery,
  defaultForm,
  encodeQuery,
  parseManualSequences,
  toParameterSet,
  validateForm,
} from "../src/state.js";
import type { DesignsResponse, OptimizedSearchResponse } from "../src/types.js";

const CURVE: OptimizedSearchResponse = {
  parameters: {},
  axis: "participants",
  points: [{ x: 32, y_min: 700, y_mean: 750, y_max: 800, designs: [] }],
};

const DESIGNS: DesignsResponse = {
  parameters: {},
  participants: 32,
  measurements: null,
  designs: [],
  individual_se: null,
};

describe("defaults", () => {
  it("prefills the worked-example parameter set", () => {
    const form = defaultForm();
    expect(form.variance).toBe(4.0);
    expect(form.correlation).toBe(0.4);
    expect(form.delta_min).toBe(1.0);
    expect(form.alpha).toBe(0.05);
    expect(form.beta).toBe(0.2);
    expect(form.var_intercept).toBe(4.0);
    expect(form.var_slope).toBe(1.0);
    expect(form.cov_intercept_slope).toBe(1.0);
    expect(form.structure).toBe("ar1");
    expect(form.scheme).toBe("pairwise");
    expect(form.include_individual).toBe(true);
  });
});

describe("validation", () => {
  it("accepts the defaults", () => {
    expect(validateForm(defaultForm())).toEqual({});
  });

  it("mirrors server domains", () => {
    const form = defaultForm();
    form.alpha = 1.5;
    form.variance = 0;
    form.correlation = 1.0;
    const errors = validateForm(form);
    expect(errors.alpha).toBeTruthy();
    expect(errors.variance).toBeTruthy();
    expect(errors.correlation).toBeTruthy();
  });

  it("flags the covariance PSD bound", () => {
    const form = defaultForm();
    form.cov_intercept_slope = 9;
    expect(validateForm(form).cov_intercept_slope).toBeTruthy();
  });

  it("requires sequences for the manual scheme", () => {
    const form = defaultForm();
    form.scheme = "manual";
    expect(validateForm(form).manual_text).toBeTruthy();
    form.manual_text = "1,0\n0,1";
    expect(validateForm(form).manual_text).toBeUndefined();
  });
});

describe("parameter mapping", () => {
  it("builds the request payload", () => {
    const params = toParameterSet(defaultForm());
    expect(params.residual).toEqual({
      variance: 4.0,
      structure: "ar1",
      correlation: 0.4,
    });
    expect(params.scheme).toEqual({ kind: "pairwise" });
  });

  it("carries manual sequences", () => {
    const form = defaultForm();
    form.scheme = "manual";
    form.manual_text = "1,0,1,0\n0,1,0,1";
    expect(toParameterSet(form).scheme.sequences).toEqual([
      [1, 0, 1, 0],
      [0, 1, 0, 1],
    ]);
  });

  it("maps the design option to the curve axis", () => {
    const form = defaultForm();
    expect(curveAxis(form)).toBe("participants");
    form.design_option = "total_vs_measurements";
    expect(curveAxis(form)).toBe("measurements_per_participant");
  });

  it("parses manual text", () => {
    expect(parseManualSequences(" 1, 0 \n\n0,1\n")).toEqual([
      [1, 0],
      [0, 1],
    ]);
  });
});

describe("store invariants", () => {
  it("downstream panels clear when a selection clears", () => {
    const store = new Store();
    store.setCurve(CURVE);
    store.selectPrimary(32);
    store.setPrimaryPayload(DESIGNS);
    store.selectSecondary(24);
    store.setSecondaryPayload({ ...DESIGNS, measurements: 24 });
    expect(store.get().secondaryPayload).not.toBeNull();

    store.selectPrimary(16);
    const state = store.get();
    expect(state.primaryPayload).toBeNull();
    expect(state.secondarySelection).toBeNull();
    expect(state.secondaryPayload).toBeNull();
  });

  it("a new curve clears every selection", () => {
    const store = new Store();
    store.setCurve(CURVE);
    store.selectPrimary(32);
    store.setPrimaryPayload(DESIGNS);
    store.setCurve(CURVE);
    expect(store.get().primarySelection).toBeNull();
    expect(store.get().primaryPayload).toBeNull();
  });

  it("form edits clear everything fetched", () => {
    const store = new Store();
    store.setCurve(CURVE);
    store.selectPrimary(32);
    store.setForm(defaultForm());
    expect(store.get().curve).toBeNull();
    expect(store.get().primarySelection).toBeNull();
  });
});

describe("URL encoding", () => {
  it("round-trips the exploration", () => {
    const store = new Store();
    const form = defaultForm();
    form.alpha = 0.01;
    form.design_option = "total_vs_measurements";
    form.include_individual = false;
    store.setForm(form);
    store.setCurve({ ...CURVE, axis: "measurements_per_participant" });
    store.selectPrimary(24);
    store.setPrimaryPayload(DESIGNS);
    store.selectSecondary(32);

    const decoded = decodeQuery(encodeQuery(store.get()));
    expect(decoded.form.alpha).toBe(0.01);
    expect(decoded.form.design_option).toBe("total_vs_measurements");
    expect(decoded.form.include_individual).toBe(false);
    expect(decoded.form.beta).toBe(0.2); // untouched default
    expect(decoded.primarySelection).toBe(24);
    expect(decoded.secondarySelection).toBe(32);
  });

  it("omits defaults entirely", () => {
    const store = new Store();
    expect(encodeQuery(store.get())).toBe("");
  });

  it("keeps manual sequences shareable", () => {
    const store = new Store();
    const form = defaultForm();
    form.scheme = "manual";
    form.manual_text = "1,0,1,0\n0,1,0,1";
    store.setForm(form);
    const decoded = decodeQuery(encodeQuery(store.get()));
    expect(decoded.form.scheme).toBe("manual");
    expect(decoded.form.manual_text).toBe("1,0,1,0\n0,1,0,1");
  });
});
