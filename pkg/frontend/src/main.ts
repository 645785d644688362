/** Dashboard bootstrap: wire the store, sliders, summary, and charts. */

import { ApiClient } from "./api.js";
import { renderCostCurve, renderFront, renderSchedule, renderSegments } from "./charts.js";
import { Debouncer } from "./debounce.js";
import { usd, percent, persons } from "./format.js";
import { DashboardStore } from "./state.js";
import { buildSliders } from "./sliders.js";

export const DEBOUNCE_MS = 150;

export function bootDashboard(root: Document = document, baseUrl?: string): DashboardStore {
  const base = baseUrl
    ?? new URLSearchParams(root.location?.search ?? "").get("api")
    ?? "";
  const store = new DashboardStore(new ApiClient(base), new Debouncer(DEBOUNCE_MS));

  const sliders = root.getElementById("sliders")!;
  buildSliders(sliders as HTMLElement, store);

  const banner = root.getElementById("banner")!;
  const retry = root.getElementById("retry")!;
  retry.addEventListener("click", () => {
    void store.loadFront().then(() => store.refresh());
  });

  const summaryFields: [string, (s: DashboardStore) => [string, string]][] = [
    ["c1", (s) => [String(s.result!.c1), usd(s.result!.c1) + "/day"]],
    ["c2", (s) => [String(s.result!.c2), usd(s.result!.c2)]],
    ["optimal-f1", (s) => [String(s.result!.optimal.f1), percent(s.result!.optimal.f1)]],
    ["optimal-f2", (s) => [String(s.result!.optimal.f2), persons(s.result!.optimal.f2) + " infections"]],
    ["optimal-total", (s) => [String(s.result!.optimal.total_cost), usd(s.result!.optimal.total_cost)]],
  ];

  store.subscribe((s) => {
    banner.classList.toggle("hidden", s.error === null);
    if (s.error !== null) {
      root.getElementById("banner-text")!.textContent = s.error;
    }
    root.getElementById("pending")!.classList.toggle("hidden", !s.pending);

    if (s.front) {
      root.getElementById("provenance")!.textContent =
        `front ${s.front.provenance.slice(0, 12)} (${s.front.points.length} points)`;
    }

    if (s.result) {
      for (const [id, render] of summaryFields) {
        const [raw, text] = render(s);
        const node = root.getElementById(id)!;
        node.textContent = text;
        node.setAttribute("data-value", raw);
      }
      root.getElementById("result-provenance")!.setAttribute(
        "data-value", s.result.provenance);
      renderFront(root.getElementById("chart-front") as unknown as SVGElement, s.result);
      renderSchedule(
        root.getElementById("chart-schedule") as unknown as SVGElement,
        s.result.optimal.schedule,
      );
      renderCostCurve(root.getElementById("chart-costs") as unknown as SVGElement, s.result);
      renderSegments(root.getElementById("segments") as HTMLElement, s.result);
    }
  });

  void store.loadFront().then(() => store.refresh());
  return store;
}

declare global {
  interface Window {
    epicostStore?: DashboardStore;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined"
    && document.getElementById("sliders")) {
  window.epicostStore = bootDashboard();
}
