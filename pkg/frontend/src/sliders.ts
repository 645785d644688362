/** Slider + numeric twin pairs for the five cost inputs.
 *
 * Money-like fields move on a log scale (the range input holds a 0..1
 * position); fractions move linearly. Both controls are keyboard
 * operable and stay in sync; edits land in the store, which debounces
 * the service call.
 */

import { CostInputs } from "./api.js";
import { DashboardStore, FIELD_RANGES } from "./state.js";

export interface SliderSpec {
  field: keyof CostInputs;
  label: string;
  log: boolean;
  step: number; // range-input step in slider units
  digits: number;
}

export const SLIDER_SPECS: SliderSpec[] = [
  { field: "gdp", label: "GDP (USD/day)", log: true, step: 0.001, digits: 0 },
  { field: "gdp_max_reduction", label: "max GDP reduction", log: false, step: 0.0005, digits: 4 },
  { field: "hospitalization_cost", label: "hospitalization cost (USD)", log: true, step: 0.001, digits: 0 },
  { field: "vsl", label: "value of statistical life (USD)", log: true, step: 0.001, digits: 0 },
  { field: "fatality", label: "fatality rate", log: false, step: 0.0001, digits: 4 },
];

function toSlider(spec: SliderSpec, value: number): number {
  const { min, max } = FIELD_RANGES[spec.field];
  if (!spec.log) return value;
  return (Math.log10(value) - Math.log10(min)) / (Math.log10(max) - Math.log10(min));
}

function fromSlider(spec: SliderSpec, pos: number): number {
  const { min, max } = FIELD_RANGES[spec.field];
  if (!spec.log) return pos;
  return 10 ** (Math.log10(min) + pos * (Math.log10(max) - Math.log10(min)));
}

export function buildSliders(container: HTMLElement, store: DashboardStore): void {
  for (const spec of SLIDER_SPECS) {
    const { min, max } = FIELD_RANGES[spec.field];
    const row = document.createElement("div");
    row.className = "slider-row";

    const label = document.createElement("label");
    label.textContent = spec.label;
    label.htmlFor = `slider-${spec.field}`;

    const range = document.createElement("input");
    range.type = "range";
    range.id = `slider-${spec.field}`;
    range.dataset.testid = `slider-${spec.field}`;
    range.min = String(spec.log ? 0 : min);
    range.max = String(spec.log ? 1 : max);
    range.step = String(spec.step);
    range.setAttribute("aria-label", spec.label);

    const twin = document.createElement("input");
    twin.type = "number";
    twin.dataset.testid = `number-${spec.field}`;
    twin.min = String(min);
    twin.max = String(max);
    twin.setAttribute("aria-label", `${spec.label} (numeric)`);

    const error = document.createElement("span");
    error.className = "field-error";
    error.dataset.testid = `error-${spec.field}`;

    range.addEventListener("input", () => {
      const value = fromSlider(spec, Number(range.value));
      store.setInput(spec.field, value);
    });
    twin.addEventListener("change", () => {
      store.setInput(spec.field, Number(twin.value));
    });

    store.subscribe(() => {
      const value = store.inputs[spec.field];
      range.value = String(toSlider(spec, value));
      if (document.activeElement !== twin) {
        twin.value = value.toFixed(spec.digits);
      }
      error.textContent = store.fieldErrors[spec.field] ?? "";
    });

    row.append(label, range, twin, error);
    container.appendChild(row);
  }

  // isolation period is baked into the precomputed front; surfaced
  // read-only so nobody mistakes it for a free knob
  const quarantine = document.createElement("div");
  quarantine.className = "slider-row readonly";
  const qLabel = document.createElement("label");
  qLabel.textContent = "isolation period (days)";
  const qValue = document.createElement("input");
  qValue.type = "number";
  qValue.value = "14";
  qValue.disabled = true;
  qValue.dataset.testid = "quarantine-period";
  qValue.title = "Fixed at front-computation time: changing the isolation period "
    + "alters the dynamics behind every front point, so it needs an offline "
    + "re-optimization rather than a live slider.";
  quarantine.append(qLabel, qValue);
  container.appendChild(quarantine);
}
