/** Typed client for the cost-exploration service. */

export interface SchedulePayload {
  knot_spacing: number;
  knots: number[];
}

export interface FrontPoint {
  f1: number;
  f2: number;
  schedule: SchedulePayload;
}

export interface FrontResponse {
  schema_version: number;
  provenance: string;
  points: FrontPoint[];
}

export interface CostInputs {
  gdp: number;
  gdp_max_reduction: number;
  hospitalization_cost: number;
  vsl: number;
  fatality: number;
}

export interface PatternPayload {
  begin: number | null;
  increase: number[];
  strong: number[];
  decrease: number[];
}

export interface SegmentPayload {
  lo: number;
  hi: number;
  pattern: PatternPayload;
  representative_index: number;
  total_cost_range: [number, number];
  total_infection_range: [number, number];
}

export interface CostOptimalResponse {
  schema_version: number;
  provenance: string;
  c1: number;
  c2: number;
  front: { f1: number[]; f2: number[] };
  curve: {
    intervention_cost: number[];
    infection_cost: number[];
    total_cost: number[];
  };
  optimal: {
    index: number;
    f1: number;
    f2: number;
    schedule: SchedulePayload;
    total_cost: number;
  };
  sweep: {
    grid: number[];
    optimal_index: number[];
    optimal_f1: number[];
    optimal_total_cost: number[];
  };
  segments: SegmentPayload[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`service responded ${status}`);
  }
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  async front(): Promise<FrontResponse> {
    const res = await fetch(`${this.baseUrl}/v1/front`);
    if (!res.ok) throw new ApiError(res.status, await res.text());
    return res.json();
  }

  async costOptimal(inputs: CostInputs): Promise<CostOptimalResponse> {
    const res = await fetch(`${this.baseUrl}/v1/cost-optimal`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(inputs),
    });
    if (!res.ok) {
      let detail: unknown;
      try {
        detail = await res.json();
      } catch {
        detail = await res.text();
      }
      throw new ApiError(res.status, detail);
    }
    return res.json();
  }
}
