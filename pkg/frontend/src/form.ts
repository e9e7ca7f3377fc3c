/** Input panel (a): parameter entry with inline validation. */

import type { FieldErrors, FormValues } from "./state.js";
import { validateForm } from "./state.js";

interface FieldSpec {
  key: keyof FormValues;
  label: string;
  kind: "number" | "select" | "checkbox";
  options?: string[];
  step?: string;
  title?: string;
}

const FIELDS: FieldSpec[] = [
  { key: "alpha", label: "Type I error α", kind: "number", step: "0.01" },
  { key: "beta", label: "Type II error β", kind: "number", step: "0.05" },
  { key: "delta_min", label: "Minimal important effect Δ", kind: "number", step: "0.1" },
  { key: "intercepts", label: "Intercepts", kind: "select", options: ["fixed", "random"] },
  { key: "slopes", label: "Slopes", kind: "select", options: ["common", "random"] },
  { key: "variance", label: "Residual variance σ²", kind: "number", step: "0.5" },
  {
    key: "structure", label: "Residual correlation structure", kind: "select",
    options: ["independent", "exchangeable", "ar1"],
  },
  { key: "correlation", label: "Residual correlation ρ", kind: "number", step: "0.1" },
  { key: "var_intercept", label: "Random-intercept variance σ²μ", kind: "number", step: "0.5" },
  { key: "var_slope", label: "Random-slope variance σ²δ", kind: "number", step: "0.25" },
  { key: "cov_intercept_slope", label: "Intercept-slope covariance σμδ", kind: "number", step: "0.25" },
  {
    key: "design_option", label: "Design option", kind: "select",
    options: ["total_vs_participants", "total_vs_measurements"],
  },
  { key: "range_lo", label: "x-range from", kind: "number", step: "1" },
  { key: "range_hi", label: "x-range to", kind: "number", step: "1" },
  {
    key: "include_individual",
    label: "Calculate standard error for individual-specific treatment effect estimates",
    kind: "checkbox",
  },
  { key: "optimize_y_only", label: "Optimize over the y-axis scale only", kind: "checkbox" },
];

const OPTION_LABELS: Record<string, string> = {
  total_vs_participants: "Total # of measurements vs. # of participants",
  total_vs_measurements: "Total # of measurements vs. # of measurements per participant",
  fixed: "fixed",
  random: "random",
  common: "common",
  independent: "independent",
  exchangeable: "exchangeable",
  ar1: "AR-1",
};

export interface FormCallbacks {
  onSubmit: (form: FormValues) => void;
  onUpload: (content: string) => Promise<string | null>;
}

export function renderForm(
  container: HTMLElement,
  initial: FormValues,
  callbacks: FormCallbacks,
): void {
  container.textContent = "";
  const form = document.createElement("form");
  form.className = "input-panel";
  form.noValidate = true;
  const current: FormValues = { ...initial };

  const errorSlots = new Map<string, HTMLElement>();

  const addError = (key: string, parent: HTMLElement) => {
    const slot = document.createElement("span");
    slot.className = "field-error";
    slot.dataset.errorFor = key;
    parent.appendChild(slot);
    errorSlots.set(key, slot);
  };

  for (const field of FIELDS) {
    const wrap = document.createElement("label");
    wrap.className = `field field-${field.kind}`;
    const caption = document.createElement("span");
    caption.className = "field-label";
    caption.textContent = field.label;

    let input: HTMLInputElement | HTMLSelectElement;
    if (field.kind === "select") {
      input = document.createElement("select");
      for (const option of field.options ?? []) {
        const node = document.createElement("option");
        node.value = option;
        node.textContent = OPTION_LABELS[option] ?? option;
        input.appendChild(node);
      }
      input.value = String(current[field.key]);
    } else if (field.kind === "checkbox") {
      input = document.createElement("input");
      input.type = "checkbox";
      input.checked = Boolean(current[field.key]);
    } else {
      input = document.createElement("input");
      input.type = "number";
      input.step = field.step ?? "any";
      input.value = String(current[field.key]);
    }
    input.name = field.key;
    input.addEventListener("change", () => {
      const target = current as unknown as Record<string, unknown>;
      if (field.kind === "checkbox") {
        target[field.key] = (input as HTMLInputElement).checked;
      } else if (field.kind === "number") {
        target[field.key] = Number((input as HTMLInputElement).value);
      } else {
        target[field.key] = input.value;
      }
    });

    if (field.kind === "checkbox") {
      wrap.appendChild(input);
      wrap.appendChild(caption);
    } else {
      wrap.appendChild(caption);
      wrap.appendChild(input);
    }
    addError(field.key, wrap);
    form.appendChild(wrap);
  }

  // randomization scheme with manual upload
  const schemeWrap = document.createElement("fieldset");
  schemeWrap.className = "field scheme-field";
  const legend = document.createElement("legend");
  legend.textContent = "Possible sequences";
  schemeWrap.appendChild(legend);
  const manualArea = document.createElement("textarea");
  for (const kind of ["alternating", "pairwise", "manual"] as const) {
    const label = document.createElement("label");
    label.className = "scheme-option";
    const radio = document.createElement("input");
    radio.type = "radio";
    radio.name = "scheme";
    radio.value = kind;
    radio.checked = current.scheme === kind;
    radio.addEventListener("change", () => {
      if (radio.checked) current.scheme = kind;
      manualArea.parentElement!.hidden = current.scheme !== "manual";
    });
    label.appendChild(radio);
    label.appendChild(
      document.createTextNode(
        kind === "manual" ? "User-specified sequences" : `${kind} randomization`,
      ),
    );
    schemeWrap.appendChild(label);
  }
  const manualWrap = document.createElement("div");
  manualWrap.className = "manual-sequences";
  manualWrap.hidden = current.scheme !== "manual";
  manualArea.name = "manual_text";
  manualArea.rows = 4;
  manualArea.placeholder = "one sequence per line, e.g. 1,0,1,0";
  manualArea.value = current.manual_text;
  manualArea.addEventListener("change", () => {
    current.manual_text = manualArea.value;
  });
  const fileInput = document.createElement("input");
  fileInput.type = "file";
  fileInput.accept = ".txt,.csv,text/plain";
  fileInput.name = "sequence_file";
  const readAsText = (file: File) =>
    new Promise<string>((resolve, reject) => {
      const reader = new FileReader();
      reader.onload = () => resolve(String(reader.result ?? ""));
      reader.onerror = () => reject(reader.error);
      reader.readAsText(file);
    });
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    const text = await readAsText(file);
    const problem = await callbacks.onUpload(text);
    const slot = errorSlots.get("manual_text")!;
    if (problem) {
      slot.textContent = problem;
      return;
    }
    slot.textContent = "";
    manualArea.value = text.trim();
    current.manual_text = text.trim();
    current.scheme = "manual";
    (schemeWrap.querySelector('input[value="manual"]') as HTMLInputElement).checked = true;
    manualWrap.hidden = false;
  });
  manualWrap.appendChild(manualArea);
  manualWrap.appendChild(fileInput);
  addError("manual_text", manualWrap);
  schemeWrap.appendChild(manualWrap);
  form.appendChild(schemeWrap);

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Update designs";
  form.appendChild(submit);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const errors = validateForm(current);
    showErrors(errorSlots, errors);
    if (Object.keys(errors).length === 0) {
      callbacks.onSubmit({ ...current });
    }
  });

  container.appendChild(form);
}

function showErrors(slots: Map<string, HTMLElement>, errors: FieldErrors): void {
  for (const [key, slot] of slots.entries()) {
    slot.textContent = (errors as Record<string, string | undefined>)[key] ?? "";
  }
}
