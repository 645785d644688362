import { describe, expect, it } from "vitest";

import { ApiClient, CostOptimalResponse } from "../src/api.js";
import { Debouncer } from "../src/debounce.js";
import { DashboardStore } from "../src/state.js";

function fakeResponse(tag: number): CostOptimalResponse {
  return {
    schema_version: 1,
    provenance: "p",
    c1: tag,
    c2: tag,
    front: { f1: [0.1], f2: [1.0] },
    curve: { intervention_cost: [1], infection_cost: [1], total_cost: [2] },
    optimal: {
      index: 0, f1: 0.1, f2: 1.0, total_cost: tag,
      schedule: { knot_spacing: 14, knots: [0, 0.5] },
    },
    sweep: { grid: [1, 10], optimal_index: [0, 0], optimal_f1: [0.1, 0.1],
             optimal_total_cost: [1, 1] },
    segments: [],
  };
}

describe("DashboardStore request sequencing", () => {
  it("drops a superseded response even if it resolves last", async () => {
    const resolvers: ((r: CostOptimalResponse) => void)[] = [];
    const client = {
      front: async () => ({ schema_version: 1, provenance: "p", points: [] }),
      costOptimal: () =>
        new Promise<CostOptimalResponse>((resolve) => resolvers.push(resolve)),
    } as unknown as ApiClient;

    const store = new DashboardStore(client, new Debouncer(0));
    const first = store.refresh();
    const second = store.refresh();
    expect(resolvers.length).toBe(2);
    // the newer request resolves first; the older one limps in afterwards
    resolvers[1](fakeResponse(2));
    await second;
    resolvers[0](fakeResponse(1));
    await first;
    expect(store.result?.c2).toBe(2);
  });

  it("routes 422 field errors to the offending field", async () => {
    const client = {
      front: async () => ({ schema_version: 1, provenance: "p", points: [] }),
      costOptimal: async () => {
        const { ApiError } = await import("../src/api.js");
        throw new ApiError(422, {
          detail: [{ loc: ["body", "fatality"], msg: "too large" }],
        });
      },
    } as unknown as ApiClient;
    const store = new DashboardStore(client, new Debouncer(0));
    await store.refresh();
    expect(store.fieldErrors.fatality).toBe("too large");
    expect(store.error).toBeNull();
  });

  it("rejects out-of-range input locally without calling the service", () => {
    let calls = 0;
    const client = {
      costOptimal: async () => {
        calls += 1;
        return fakeResponse(1);
      },
    } as unknown as ApiClient;
    const store = new DashboardStore(client, new Debouncer(0));
    store.setInput("fatality", 2.0);
    expect(store.fieldErrors.fatality).toMatch(/must be in/);
    expect(calls).toBe(0);
  });
});
