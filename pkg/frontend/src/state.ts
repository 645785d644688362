/** Dashboard state: slider values, in-flight request tracking, last results.
 *
 * Every displayed number comes from a service response; this store never
 * derives costs locally. Responses from superseded requests are dropped,
 * so the view always reflects the newest slider position that reached
 * the service.
 */

import { ApiClient, ApiError, CostInputs, CostOptimalResponse, FrontResponse } from "./api.js";
import { Debouncer } from "./debounce.js";

export interface FieldRange {
  min: number;
  max: number;
}

export const FIELD_RANGES: Record<keyof CostInputs, FieldRange> = {
  gdp: { min: 1e8, max: 1e11 },
  gdp_max_reduction: { min: 0.0, max: 0.2 },
  hospitalization_cost: { min: 100.0, max: 1e6 },
  vsl: { min: 1e5, max: 1e8 },
  fatality: { min: 0.0, max: 0.1 },
};

export const BASELINE_INPUTS: CostInputs = {
  gdp: 4519595671.232877,
  gdp_max_reduction: 0.0426,
  hospitalization_cost: 21913.0,
  vsl: 1000000.0,
  fatality: 0.0173,
};

export type Listener = (store: DashboardStore) => void;

export class DashboardStore {
  inputs: CostInputs = { ...BASELINE_INPUTS };
  front: FrontResponse | null = null;
  result: CostOptimalResponse | null = null;
  pending = false;
  error: string | null = null;
  fieldErrors: Partial<Record<keyof CostInputs, string>> = {};

  private requestSeq = 0;
  private listeners: Listener[] = [];

  constructor(
    private client: ApiClient,
    private debouncer: Debouncer,
  ) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const fn of this.listeners) fn(this);
  }

  async loadFront(): Promise<void> {
    try {
      this.front = await this.client.front();
      this.error = null;
    } catch (err) {
      this.error = describe(err);
    }
    this.notify();
  }

  /** Slider/numeric-twin edits funnel through here (debounced fetch). */
  setInput(field: keyof CostInputs, value: number): void {
    const range = FIELD_RANGES[field];
    if (!Number.isFinite(value) || value < range.min || value > range.max) {
      this.fieldErrors = { ...this.fieldErrors, [field]: `must be in [${range.min}, ${range.max}]` };
      this.notify();
      return;
    }
    delete this.fieldErrors[field];
    this.inputs = { ...this.inputs, [field]: value };
    this.pending = true;
    this.notify();
    this.debouncer.schedule(() => void this.refresh());
  }

  /** Issue the request immediately (used on boot and by tests). */
  async refresh(): Promise<void> {
    const id = ++this.requestSeq;
    const snapshot = { ...this.inputs };
    this.pending = true;
    this.notify();
    try {
      const result = await this.client.costOptimal(snapshot);
      if (id !== this.requestSeq) return; // superseded while in flight
      if (this.front && result.provenance !== this.front.provenance) return; // stale artifact
      this.result = result;
      this.error = null;
      this.fieldErrors = {};
    } catch (err) {
      if (id !== this.requestSeq) return;
      if (err instanceof ApiError && err.status === 422) {
        this.applyFieldErrors(err.detail);
      } else {
        this.error = describe(err);
      }
    } finally {
      if (id === this.requestSeq) {
        this.pending = false;
        this.notify();
      }
    }
  }

  private applyFieldErrors(detail: unknown): void {
    const entries = (detail as { detail?: { loc: unknown[]; msg: string }[] })?.detail;
    if (!Array.isArray(entries)) return;
    for (const entry of entries) {
      const field = entry.loc?.[entry.loc.length - 1];
      if (typeof field === "string" && field in FIELD_RANGES) {
        this.fieldErrors[field as keyof CostInputs] = entry.msg;
      }
    }
    this.notify();
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `service error ${err.status}`;
  return err instanceof Error ? `service unreachable: ${err.message}` : String(err);
}
