/** Scripted end-to-end dashboard test.
 *
 * The DOM comes from the real index.html; fetch is mocked with responses
 * recorded from the real service (tests/fixtures/responses.json), so every
 * number asserted against the DOM is a genuine service value.
 */

import fs from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { bootDashboard } from "../src/main.js";
import type { CostOptimalResponse } from "../src/api.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const FIXTURES = JSON.parse(
  fs.readFileSync(path.join(HERE, "fixtures", "responses.json"), "utf8"),
);
const PAGE = fs.readFileSync(path.join(HERE, "..", "index.html"), "utf8");

interface RecordedCase {
  field: string;
  value: number;
  body: Record<string, number>;
  response: CostOptimalResponse;
}

function setupDom(): void {
  const body = PAGE.match(/<body>([\s\S]*)<\/body>/)![1]
    .replace(/<script[\s\S]*?<\/script>/, "");
  document.body.innerHTML = body;
}

function respond(payload: unknown) {
  return {
    ok: true,
    status: 200,
    json: async () => payload,
    text: async () => JSON.stringify(payload),
  };
}

function mockFetch() {
  const costCalls: Record<string, number>[] = [];
  const mock = vi.fn(async (url: unknown, init?: { body?: string }) => {
    const target = String(url);
    if (target.endsWith("/v1/front")) return respond(FIXTURES.front);
    if (target.endsWith("/v1/cost-optimal")) {
      const body = JSON.parse(init!.body!);
      costCalls.push(body);
      const hit = (FIXTURES.cases as RecordedCase[]).find((c) =>
        Object.entries(c.body).every(([k, v]) => body[k] === v),
      );
      if (!hit) throw new Error(`no recorded response for ${init!.body}`);
      return respond(hit.response);
    }
    throw new Error(`unexpected request ${target}`);
  });
  vi.stubGlobal("fetch", mock);
  return costCalls;
}

async function flushMicrotasks(rounds = 6): Promise<void> {
  for (let k = 0; k < rounds; k++) await Promise.resolve();
}

async function settle(): Promise<void> {
  await vi.advanceTimersByTimeAsync(160);
  await flushMicrotasks();
}

function setNumberInput(field: string, value: number): void {
  const twin = document.querySelector(
    `[data-testid="number-${field}"]`,
  ) as HTMLInputElement;
  twin.value = String(value);
  twin.dispatchEvent(new Event("change"));
}

function dataValue(id: string): string {
  return document.getElementById(id)!.getAttribute("data-value")!;
}

describe("dashboard", () => {
  let costCalls: Record<string, number>[];

  beforeEach(async () => {
    vi.useFakeTimers();
    setupDom();
    costCalls = mockFetch();
    bootDashboard(document, "");
    await flushMicrotasks();
    await settle();
  });

  afterEach(() => {
    vi.useRealTimers();
    vi.unstubAllGlobals();
  });

  it("renders every summary number straight from the service response", async () => {
    const byField = new Map<string, RecordedCase[]>();
    for (const c of FIXTURES.cases as RecordedCase[]) {
      if (!byField.has(c.field)) byField.set(c.field, []);
      byField.get(c.field)!.push(c);
    }
    expect([...byField.keys()].sort()).toEqual([
      "fatality", "gdp", "gdp_max_reduction", "hospitalization_cost", "vsl",
    ]);

    for (const [field, cases] of byField) {
      for (const recorded of cases) {
        setNumberInput(field, recorded.value);
        await settle();
        const res = recorded.response;
        expect(dataValue("c1")).toBe(String(res.c1));
        expect(dataValue("c2")).toBe(String(res.c2));
        expect(dataValue("optimal-f1")).toBe(String(res.optimal.f1));
        expect(dataValue("optimal-f2")).toBe(String(res.optimal.f2));
        expect(dataValue("optimal-total")).toBe(String(res.optimal.total_cost));
        expect(dataValue("result-provenance")).toBe(res.provenance);

        const dot = document.querySelector('[data-testid="front-optimal"]')!;
        expect(dot.getAttribute("data-index")).toBe(String(res.optimal.index));
        expect(dot.getAttribute("data-f1")).toBe(String(res.optimal.f1));
        expect(dot.getAttribute("data-f2")).toBe(String(res.optimal.f2));
        const curveDot = document.querySelector('[data-testid="curve-optimal"]')!;
        expect(curveDot.getAttribute("data-total-cost"))
          .toBe(String(res.optimal.total_cost));

        const active = document.querySelectorAll(".segment-active");
        const owner = res.segments.filter(
          (s) => s.lo <= res.c2 && res.c2 <= s.hi,
        );
        expect(active.length).toBe(owner.length);
        if (owner.length) {
          expect(active[0].getAttribute("data-begin"))
            .toBe(owner[0].pattern.begin === null ? "none" : String(owner[0].pattern.begin));
        }
      }
      // park the field back at the baseline before sweeping the next one
      setNumberInput(field, (FIXTURES.cases as RecordedCase[])
        .find((c) => c.field === field && c.body[field] === baselineOf(field))?.value
        ?? baselineOf(field));
      await settle();
    }
  });

  it("raising the value of a statistical life never weakens the optimum", async () => {
    const sweep = (FIXTURES.cases as RecordedCase[])
      .filter((c) => c.field === "vsl")
      .sort((a, b) => a.value - b.value);
    expect(sweep.length).toBeGreaterThanOrEqual(10);
    const seen: number[] = [];
    for (const recorded of sweep) {
      setNumberInput("vsl", recorded.value);
      await settle();
      seen.push(Number(dataValue("optimal-f1")));
    }
    for (let k = 1; k < seen.length; k++) {
      expect(seen[k]).toBeGreaterThanOrEqual(seen[k - 1]);
    }
  });

  it("a burst of slider moves issues exactly one request", async () => {
    const sweep = (FIXTURES.cases as RecordedCase[]).filter((c) => c.field === "vsl");
    const before = costCalls.length;
    for (const recorded of sweep.slice(0, 5)) {
      setNumberInput("vsl", recorded.value);
      await vi.advanceTimersByTimeAsync(30); // within the debounce window
    }
    await settle();
    expect(costCalls.length).toBe(before + 1);
    expect(costCalls[costCalls.length - 1].vsl).toBe(sweep[4].value);
  });

  it("keeps sliders keyboard-reachable with numeric twins", () => {
    for (const field of ["gdp", "gdp_max_reduction", "hospitalization_cost",
                         "vsl", "fatality"]) {
      const slider = document.querySelector(`[data-testid="slider-${field}"]`);
      const twin = document.querySelector(`[data-testid="number-${field}"]`);
      expect(slider, field).not.toBeNull();
      expect(twin, field).not.toBeNull();
      expect(slider!.getAttribute("aria-label")).toBeTruthy();
    }
    const quarantine = document.querySelector('[data-testid="quarantine-period"]');
    expect((quarantine as HTMLInputElement).disabled).toBe(true);
    expect((quarantine as HTMLInputElement).title.length).toBeGreaterThan(10);
  });
});

function baselineOf(field: string): number {
  const base: Record<string, number> = {
    gdp: 4519595671.232877,
    gdp_max_reduction: 0.0426,
    hospitalization_cost: 21913.0,
    vsl: 1000000.0,
    fatality: 0.0173,
  };
  return base[field];
}
