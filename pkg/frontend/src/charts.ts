/** Minimal SVG chart renderers fed by raw response arrays.
 *
 * Each renderer wipes and redraws its <svg>. The highlighted elements
 * carry data-* attributes with the raw values they were bound to, so
 * tests (and curious users) can check the binding against the service
 * response exactly.
 */

import { CostOptimalResponse, SchedulePayload, SegmentPayload } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 420;
const H = 260;
const PAD = { left: 58, right: 12, top: 12, bottom: 34 };

function el(name: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function clear(svg: SVGElement): void {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
}

interface Scale {
  (value: number): number;
}

function linScale(lo: number, hi: number, a: number, b: number): Scale {
  const span = hi - lo || 1;
  return (v) => a + ((v - lo) / span) * (b - a);
}

function logScale(lo: number, hi: number, a: number, b: number): Scale {
  const llo = Math.log10(Math.max(lo, 1e-12));
  const lhi = Math.log10(Math.max(hi, 1e-12));
  const span = lhi - llo || 1;
  return (v) => a + ((Math.log10(Math.max(v, 1e-12)) - llo) / span) * (b - a);
}

function polyline(points: [number, number][], attrs: Record<string, string>): SVGElement {
  const node = el("polyline", attrs);
  node.setAttribute("points", points.map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`).join(" "));
  node.setAttribute("fill", "none");
  return node;
}

function axisLabels(svg: SVGElement, xLabel: string, yLabel: string): void {
  const x = el("text", { x: W / 2, y: H - 6, class: "axis-label", "text-anchor": "middle" });
  x.textContent = xLabel;
  const y = el("text", {
    x: 14, y: H / 2, class: "axis-label", "text-anchor": "middle",
    transform: `rotate(-90 14 ${H / 2})`,
  });
  y.textContent = yLabel;
  svg.append(x, y);
}

/** Pareto front (f2 on log scale) with the cost-optimal point highlighted. */
export function renderFront(svg: SVGElement, res: CostOptimalResponse): void {
  clear(svg);
  const { f1, f2 } = res.front;
  if (!f1.length) return;
  const sx = linScale(Math.min(...f1), Math.max(...f1), PAD.left, W - PAD.right);
  const sy = logScale(Math.min(...f2), Math.max(...f2), H - PAD.bottom, PAD.top);
  svg.appendChild(polyline(f1.map((v, i) => [sx(v), sy(f2[i])]), { class: "front-line" }));
  const k = res.optimal.index;
  const dot = el("circle", {
    cx: sx(f1[k]), cy: sy(f2[k]), r: 6, class: "optimal-dot",
    "data-testid": "front-optimal",
    "data-index": k, "data-f1": res.optimal.f1, "data-f2": res.optimal.f2,
  });
  svg.appendChild(dot);
  axisLabels(svg, "average transmission reduction f1", "infections f2 (log)");
}

/** Selected reduction schedule as a step chart. */
export function renderSchedule(svg: SVGElement, schedule: SchedulePayload): void {
  clear(svg);
  const { knots, knot_spacing } = schedule;
  if (!knots.length) return;
  const weeks = (knots.length - 1) * knot_spacing / 7;
  const sx = linScale(0, Math.max(weeks, 1), PAD.left, W - PAD.right);
  const sy = linScale(0, 1, H - PAD.bottom, PAD.top);
  const steps: [number, number][] = [];
  knots.forEach((level, j) => {
    const w0 = (j * knot_spacing) / 7;
    const w1 = ((j + 1) * knot_spacing) / 7;
    steps.push([sx(w0), sy(level)], [sx(Math.min(w1, weeks)), sy(level)]);
  });
  svg.appendChild(polyline(steps, { class: "schedule-line", "data-testid": "schedule-line" }));
  axisLabels(svg, "week", "reduction level");
}

/** Total/intervention/infection cost along the front at the current c2. */
export function renderCostCurve(svg: SVGElement, res: CostOptimalResponse): void {
  clear(svg);
  const { f1 } = res.front;
  const { total_cost, intervention_cost, infection_cost } = res.curve;
  if (!f1.length) return;
  const positive = total_cost.filter((v) => v > 0);
  const lo = positive.length ? Math.min(...positive) : 1;
  const sx = linScale(Math.min(...f1), Math.max(...f1), PAD.left, W - PAD.right);
  const sy = logScale(lo, Math.max(...total_cost), H - PAD.bottom, PAD.top);
  const line = (vals: number[], cls: string) =>
    polyline(f1.map((v, i) => [sx(v), sy(Math.max(vals[i], lo))]), { class: cls });
  svg.appendChild(line(intervention_cost, "intervention-line"));
  svg.appendChild(line(infection_cost, "infection-line"));
  svg.appendChild(line(total_cost, "total-line"));
  const k = res.optimal.index;
  svg.appendChild(el("circle", {
    cx: sx(f1[k]), cy: sy(Math.max(total_cost[k], lo)), r: 6, class: "optimal-dot",
    "data-testid": "curve-optimal", "data-total-cost": res.optimal.total_cost,
  }));
  axisLabels(svg, "average transmission reduction f1", "cost, USD (log)");
}

/** Horizontal cost-per-infection bar split into pattern segments. */
export function renderSegments(container: HTMLElement, res: CostOptimalResponse): void {
  container.replaceChildren();
  const segments: SegmentPayload[] = res.segments;
  if (!segments.length) return;
  const lo = Math.log10(segments[0].lo);
  const hi = Math.log10(segments[segments.length - 1].hi);
  const span = hi - lo || 1;
  segments.forEach((seg, i) => {
    const div = document.createElement("div");
    div.className = "segment";
    const active = seg.lo <= res.c2 && res.c2 <= seg.hi;
    if (active) div.classList.add("segment-active");
    div.style.left = `${(100 * (Math.log10(seg.lo) - lo)) / span}%`;
    div.style.width = `${(100 * (Math.log10(seg.hi) - Math.log10(seg.lo))) / span}%`;
    div.dataset.testid = `segment-${i}`;
    div.dataset.active = String(active);
    div.dataset.begin = seg.pattern.begin === null ? "none" : String(seg.pattern.begin);
    div.title = `cost/infection ${seg.lo.toExponential(2)} to ${seg.hi.toExponential(2)} USD; `
      + `pattern begins week ${seg.pattern.begin ?? "-"}`;
    const label = document.createElement("span");
    label.textContent = seg.pattern.begin === null ? "-" : `wk ${seg.pattern.begin}`;
    div.appendChild(label);
    container.appendChild(div);
  });
  const marker = document.createElement("div");
  marker.className = "segment-marker";
  const clamped = Math.min(Math.max(Math.log10(res.c2), lo), hi);
  marker.style.left = `${(100 * (clamped - lo)) / span}%`;
  marker.title = `current cost per infection`;
  container.appendChild(marker);
}
