/** Explorer wiring: form -> curve -> click-to-fix drill-downs.
 *
 * Every number on screen comes from a service response field; the client
 * computes nothing statistical.  Selections live in the URL so explorations
 * are shareable.
 */

import { ApiClient, ApiRequestError } from "./api.js";
import { renderBandChart, type Series } from "./chart.js";
import { renderForm } from "./form.js";
import {
  Store,
  curveAxis,
  decodeQuery,
  encodeQuery,
  toParameterSet,
  type ExplorerState,
} from "./state.js";
import { renderDesignTable } from "./tables.js";

const SERIES_COLORS: Record<string, string> = {
  naive: "#c23b22",
  shrunken_fixed: "#1f6f8b",
  shrunken_random: "#5a9e6f",
};

export interface AppHandles {
  store: Store;
  api: ApiClient;
  runExplore: () => Promise<void>;
  selectPrimary: (x: number) => Promise<void>;
  selectSecondary: (x: number) => Promise<void>;
}

export function mountApp(root: HTMLElement, apiBase = ""): AppHandles {
  const api = new ApiClient(apiBase);
  const store = new Store();

  root.innerHTML = `
    <header>
      <h1>n-of-1 series design explorer</h1>
      <p class="subtitle">Find balanced designs that reach the power target,
      then refine them against individual-effect precision.</p>
    </header>
    <main>
      <section id="panel-a" class="panel"><h2>Parameters</h2><div id="form-root"></div></section>
      <section id="panel-b" class="panel" hidden>
        <h2>Required measurements</h2>
        <div id="params-echo"></div>
        <div id="curve-chart"></div>
      </section>
      <section id="panel-c" class="panel" hidden>
        <h2 id="panel-c-title">Optimized designs</h2>
        <div id="primary-table"></div>
      </section>
      <section id="panel-d" class="panel" hidden>
        <h2>Individual-effect standard errors</h2>
        <div id="se-chart"></div>
      </section>
      <section id="panel-e" class="panel" hidden>
        <h2 id="panel-e-title">Designs at the fixed point</h2>
        <div id="secondary-table"></div>
      </section>
      <p id="error-banner" class="error-banner" hidden></p>
    </main>
  `;

  const q = (selector: string) => root.querySelector(selector) as HTMLElement;

  function describeError(error: unknown): string {
    if (error instanceof ApiRequestError) {
      const field = error.payload.field ? ` (${error.payload.field})` : "";
      return `${error.payload.message}${field}`;
    }
    return error instanceof Error ? error.message : String(error);
  }

  async function runExplore(): Promise<void> {
    const state = store.get();
    const axis = curveAxis(state.form);
    try {
      const curve = await api.searchOptimized(
        toParameterSet(state.form),
        axis,
        [state.form.range_lo, state.form.range_hi],
        state.form.optimize_y_only,
      );
      store.setCurve(curve);
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      if (error instanceof ApiRequestError && error.payload.code === "infeasible") {
        store.setCurve({ parameters: {}, axis, points: [] });
        return;
      }
      store.setError(describeError(error));
    }
  }

  async function selectPrimary(x: number): Promise<void> {
    const state = store.get();
    store.selectPrimary(x);
    const fixes =
      curveAxis(state.form) === "participants"
        ? { participants: x }
        : { measurements: x };
    try {
      const payload = await api.designs(
        toParameterSet(state.form), fixes, state.form.include_individual, "primary",
      );
      store.setPrimaryPayload(payload);
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      store.setError(describeError(error));
    }
  }

  async function selectSecondary(x: number): Promise<void> {
    const state = store.get();
    if (state.primarySelection === null) return;
    store.selectSecondary(x);
    const fixes =
      curveAxis(state.form) === "participants"
        ? { participants: state.primarySelection, measurements: x }
        : { measurements: state.primarySelection, participants: x };
    try {
      const payload = await api.designs(
        toParameterSet(state.form), fixes, state.form.include_individual, "secondary",
      );
      store.setSecondaryPayload(payload);
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      store.setError(describeError(error));
    }
  }

  function axisLabel(state: ExplorerState): string {
    return curveAxis(state.form) === "participants"
      ? "participants (I·J)"
      : "measurements per participant (K·L)";
  }

  function otherAxisLabel(state: ExplorerState): string {
    return curveAxis(state.form) === "participants"
      ? "measurements per participant (K·L)"
      : "participants (I·J)";
  }

  function render(state: ExplorerState): void {
    const banner = q("#error-banner");
    banner.hidden = state.error === null;
    banner.textContent = state.error ?? "";

    const panelB = q("#panel-b");
    panelB.hidden = state.curve === null;
    if (state.curve) {
      const echo = q("#params-echo");
      echo.textContent = "";
      const summary = document.createElement("p");
      summary.className = "params-echo";
      const f = state.form;
      summary.textContent =
        `α=${f.alpha}, β=${f.beta}, Δ=${f.delta_min}, ${f.intercepts} intercepts / ` +
        `${f.slopes} slopes, σ²=${f.variance} ${f.structure}` +
        (f.structure === "independent" ? "" : ` (ρ=${f.correlation})`) +
        `, scheme: ${f.scheme}`;
      echo.appendChild(summary);
      renderBandChart(q("#curve-chart"), [
        {
          name: "required total measurements",
          color: "#1f6f8b",
          points: state.curve.points,
        },
      ], {
        xLabel: axisLabel(state),
        yLabel: "total measurements (I·J·K·L)",
        selected: state.primarySelection,
        onClick: (x) => void selectPrimary(x),
      });
    }

    const panelC = q("#panel-c");
    panelC.hidden = state.primaryPayload === null;
    if (state.primaryPayload) {
      q("#panel-c-title").textContent =
        `Designs at ${axisLabel(state)} = ${state.primarySelection}`;
      renderDesignTable(
        q("#primary-table"),
        state.primaryPayload.designs,
        state.form.include_individual,
      );
    }

    const panelD = q("#panel-d");
    const individual = state.primaryPayload?.individual_se ?? null;
    panelD.hidden = !state.form.include_individual || individual === null;
    if (!panelD.hidden && individual) {
      const series: Series[] = Object.entries(individual.series).map(
        ([name, points]) => ({
          name,
          color: SERIES_COLORS[name] ?? "#777",
          points,
        }),
      );
      renderBandChart(q("#se-chart"), series, {
        xLabel: otherAxisLabel(state),
        yLabel: "standard error",
        selected: state.secondarySelection,
        onClick: (x) => void selectSecondary(x),
      });
    }

    const panelE = q("#panel-e");
    panelE.hidden =
      !state.form.include_individual || state.secondaryPayload === null;
    if (!panelE.hidden && state.secondaryPayload) {
      q("#panel-e-title").textContent =
        `Designs at ${axisLabel(state)} = ${state.primarySelection} and ` +
        `${otherAxisLabel(state)} = ${state.secondarySelection}`;
      renderDesignTable(
        q("#secondary-table"),
        state.secondaryPayload.designs,
        state.form.include_individual,
      );
    }

    syncUrl(state);
  }

  function syncUrl(state: ExplorerState): void {
    if (typeof history === "undefined" || typeof location === "undefined") return;
    const query = encodeQuery(state);
    const url = query ? `?${query}` : location.pathname;
    history.replaceState(null, "", url);
  }

  store.subscribe(render);

  renderForm(q("#form-root"), store.get().form, {
    onSubmit: (form) => {
      store.setForm(form);
      void runExplore();
    },
    onUpload: async (content) => {
      try {
        await api.uploadSequences(content);
        return null;
      } catch (error) {
        return describeError(error);
      }
    },
  });

  // restore a shared exploration from the URL
  if (typeof location !== "undefined" && location.search.length > 1) {
    const decoded = decodeQuery(location.search.slice(1));
    store.setForm(decoded.form);
    renderForm(q("#form-root"), decoded.form, {
      onSubmit: (form) => {
        store.setForm(form);
        void runExplore();
      },
      onUpload: async (content) => {
        try {
          await api.uploadSequences(content);
          return null;
        } catch (error) {
          return describeError(error);
        }
      },
    });
    void (async () => {
      await runExplore();
      if (decoded.primarySelection !== null) {
        await selectPrimary(decoded.primarySelection);
        if (decoded.secondarySelection !== null) {
          await selectSecondary(decoded.secondarySelection);
        }
      }
    })();
  }

  return { store, api, runExplore, selectPrimary, selectSecondary };
}

declare global {
  interface Window {
    NOF1_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!, window.NOF1_API_BASE ?? "");
}
