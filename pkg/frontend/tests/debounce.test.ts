import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { Debouncer } from "../src/debounce.js";

describe("Debouncer", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("collapses a burst into one trailing call", () => {
    const debouncer = new Debouncer(150);
    const fn = vi.fn();
    for (let k = 0; k < 8; k++) {
      debouncer.schedule(fn);
      vi.advanceTimersByTime(30); // keep poking before the window closes
    }
    expect(fn).not.toHaveBeenCalled();
    vi.advanceTimersByTime(150);
    expect(fn).toHaveBeenCalledTimes(1);
  });

  it("fires once per quiet period", () => {
    const debouncer = new Debouncer(150);
    const fn = vi.fn();
    debouncer.schedule(fn);
    vi.advanceTimersByTime(151);
    debouncer.schedule(fn);
    vi.advanceTimersByTime(151);
    expect(fn).toHaveBeenCalledTimes(2);
  });

  it("cancel drops the pending call", () => {
    const debouncer = new Debouncer(150);
    const fn = vi.fn();
    debouncer.schedule(fn);
    expect(debouncer.pending).toBe(true);
    debouncer.cancel();
    vi.advanceTimersByTime(500);
    expect(fn).not.toHaveBeenCalled();
    expect(debouncer.pending).toBe(false);
  });
});
