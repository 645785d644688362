"""Monetary evaluation of Pareto fronts and cost-optimal strategy selection.

Unit costs: c1 = gdp * gdp_max_reduction is the daily cost of running at
full stringency, so a schedule with average reduction f1 over H days
costs c1 * f1 * H; c2 = hospitalization_cost + fatality * vsl is the cost
per infection, so an epidemic of size f2 costs c2 * f2.  Sweeping c2 over
a grid and recording the argmin front point per grid value yields the
cost-optimal map, which segments into a small set of structurally
distinct schedule patterns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .model import MuSchedule
from .pareto import ParetoFront, ParetoPoint

DEFAULT_GRID_RANGE = (1e3, 1e7)
DEFAULT_GRID_SIZE = 200


@dataclass(frozen=True)
class CostParams:
    """Five economic inputs.

    gdp: national GDP per day (USD/day), the base that stringency erodes
    gdp_max_reduction: fraction of daily GDP lost at full stringency
    hospitalization_cost: USD per infection
    vsl: value of a statistical life, USD
    fatality: deaths per infection
    """

    gdp: float
    gdp_max_reduction: float
    hospitalization_cost: float
    vsl: float
    fatality: float

    def __post_init__(self):
        if min(self.gdp, self.hospitalization_cost, self.vsl) < 0:
            raise ConfigError("costs must be non-negative")
        if not 0.0 <= self.gdp_max_reduction <= 1.0:
            raise ConfigError("gdp_max_reduction must lie in [0, 1]")
        if not 0.0 <= self.fatality <= 1.0:
            raise ConfigError("fatality must lie in [0, 1]")


def load_cost_params(path: str | Path) -> CostParams:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        return CostParams(
            gdp=doc["gdp"],
            gdp_max_reduction=doc["gdp_max_reduction"],
            hospitalization_cost=doc["hospitalization_cost"],
            vsl=doc["vsl"],
            fatality=doc["fatality"],
        )
    except KeyError as exc:
        raise ConfigError(f"costs config missing field {exc}") from exc


@dataclass(frozen=True)
class CostCurve:
    """Per-front-point monetary breakdown, aligned with the front order."""

    intervention_cost: np.ndarray
    infection_cost: np.ndarray
    total_cost: np.ndarray


@dataclass(frozen=True)
class CostOptimalMap:
    """Cost-optimal front point per cost-per-infection grid value."""

    grid: np.ndarray
    optimal_index: np.ndarray
    optimal_f1: np.ndarray
    optimal_total_cost: np.ndarray


@dataclass(frozen=True)
class PatternDescriptor:
    """Weekly structure of a schedule: when it starts, ramps, peaks, eases.

    Weeks are labeled on biweekly blocks (knot j covers weeks 2j and
    2j+1).  A week is "strong" if its level reaches 75% of the schedule
    maximum; ramps are week-over-week changes beyond 0.05; "begin" is the
    first week above 0.05.  An all-zero schedule has begin None and empty
    lists.
    """

    begin: int | None
    increase: tuple[int, ...]
    strong: tuple[int, ...]
    decrease: tuple[int, ...]


@dataclass(frozen=True)
class CopSegment:
    lo: float
    hi: float
    pattern: PatternDescriptor
    representative_index: int
    total_cost_range: tuple[float, float]
    total_infection_range: tuple[float, float]


@dataclass(frozen=True)
class CopSegmentation:
    segments: tuple[CopSegment, ...]

    def segment_for(self, cost_per_infection: float) -> CopSegment:
        """Segment owning a value; gaps between grid points belong left."""
        if not self.segments or cost_per_infection < self.segments[0].lo \
                or cost_per_infection > self.segments[-1].hi:
            raise ConfigError(f"{cost_per_infection} outside the swept range")
        owner = self.segments[0]
        for seg in self.segments:
            if seg.lo <= cost_per_infection:
                owner = seg
        return owner

    def __len__(self) -> int:
        return len(self.segments)


def unit_costs(params: CostParams) -> tuple[float, float]:
    """(c1: USD/day at full stringency, c2: USD per infection)."""
    return (params.gdp * params.gdp_max_reduction,
            params.hospitalization_cost + params.fatality * params.vsl)


def cost_curve(front: ParetoFront, params: CostParams, horizon: float) -> CostCurve:
    if not front.points:
        raise ConfigError("empty front")
    c1, c2 = unit_costs(params)
    intervention = c1 * front.f1_values * horizon
    infection = c2 * front.f2_values
    return CostCurve(
        intervention_cost=intervention,
        infection_cost=infection,
        total_cost=intervention + infection,
    )


def cost_optimal(front: ParetoFront, params: CostParams,
                 horizon: float) -> tuple[int, ParetoPoint, float]:
    """Front point minimizing total cost; ties go to the smaller f1."""
    curve = cost_curve(front, params, horizon)
    idx = int(np.argmin(curve.total_cost))  # first minimum = smallest f1
    return idx, front.points[idx], float(curve.total_cost[idx])


def default_grid(lo: float = DEFAULT_GRID_RANGE[0], hi: float = DEFAULT_GRID_RANGE[1],
                 n: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), n)


def sweep_cost_per_infection(front: ParetoFront, params: CostParams,
                             grid: np.ndarray, horizon: float) -> CostOptimalMap:
    """Cost-optimal selection for every cost-per-infection in the grid.

    c1 is held at the configured value; the grid replaces c2.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ConfigError("grid must be ascending with at least two values")
    if not front.points:
        raise ConfigError("empty front")
    c1, _ = unit_costs(params)
    fixed = c1 * front.f1_values * horizon          # (N,)
    totals = fixed[None, :] + grid[:, None] * front.f2_values[None, :]
    idx = np.argmin(totals, axis=1)                 # first min = smallest f1
    return CostOptimalMap(
        grid=grid,
        optimal_index=idx,
        optimal_f1=front.f1_values[idx],
        optimal_total_cost=totals[np.arange(grid.size), idx],
    )


def classify_pattern(schedule: MuSchedule) -> PatternDescriptor:
    """Weekly begin/increase/strong/decrease labels for one schedule."""
    knots = np.asarray(schedule.knots)
    if knots.size == 0:
        raise ConfigError("empty schedule")
    peak = knots.max()
    if peak <= 0.0:
        return PatternDescriptor(begin=None, increase=(), strong=(), decrease=())
    weeks = np.repeat(knots, 2)                     # knot j -> weeks 2j, 2j+1
    above = np.nonzero(weeks > 0.05)[0]
    begin = int(above[0]) if above.size else None
    strong = tuple(int(w) for w in np.nonzero(weeks >= 0.75 * peak)[0])
    delta = np.diff(weeks)
    increase = tuple(int(w) + 1 for w in np.nonzero(delta > 0.05)[0])
    decrease = tuple(int(w) + 1 for w in np.nonzero(delta < -0.05)[0])
    return PatternDescriptor(begin=begin, increase=increase,
                             strong=strong, decrease=decrease)


@dataclass(frozen=True)
class CostReport:
    """Everything a consumer needs from one cost evaluation of a front."""

    c1: float
    c2: float
    optimal_index: int
    optimal_total_cost: float
    curve: CostCurve
    cost_map: CostOptimalMap
    segmentation: CopSegmentation


def cost_report(front: ParetoFront, params: CostParams, horizon: float,
                grid: np.ndarray | None = None) -> CostReport:
    """Single evaluation path shared by the CLI cost stage and the service."""
    if grid is None:
        grid = default_grid()
    c1, c2 = unit_costs(params)
    idx, _, total = cost_optimal(front, params, horizon)
    cost_map = sweep_cost_per_infection(front, params, grid, horizon)
    return CostReport(
        c1=c1, c2=c2,
        optimal_index=idx, optimal_total_cost=total,
        curve=cost_curve(front, params, horizon),
        cost_map=cost_map,
        segmentation=segment_cops(cost_map, front),
    )


def _pattern_payload(p: PatternDescriptor) -> dict:
    return {
        "begin": p.begin,
        "increase": list(p.increase),
        "strong": list(p.strong),
        "decrease": list(p.decrease),
    }


def report_payload(report: CostReport, front: ParetoFront) -> dict:
    """JSON-ready body shared by the costmap artifact and the service."""
    opt = front.points[report.optimal_index]
    return {
        "c1": report.c1,
        "c2": report.c2,
        "front": {
            "f1": front.f1_values.tolist(),
            "f2": front.f2_values.tolist(),
        },
        "curve": {
            "intervention_cost": report.curve.intervention_cost.tolist(),
            "infection_cost": report.curve.infection_cost.tolist(),
            "total_cost": report.curve.total_cost.tolist(),
        },
        "optimal": {
            "index": report.optimal_index,
            "f1": opt.f1,
            "f2": opt.f2,
            "schedule": {
                "knot_spacing": opt.schedule.knot_spacing,
                "knots": list(opt.schedule.knots),
            },
            "total_cost": report.optimal_total_cost,
        },
        "sweep": {
            "grid": report.cost_map.grid.tolist(),
            "optimal_index": report.cost_map.optimal_index.tolist(),
            "optimal_f1": report.cost_map.optimal_f1.tolist(),
            "optimal_total_cost": report.cost_map.optimal_total_cost.tolist(),
        },
        "segments": [
            {
                "lo": seg.lo,
                "hi": seg.hi,
                "pattern": _pattern_payload(seg.pattern),
                "representative_index": seg.representative_index,
                "total_cost_range": list(seg.total_cost_range),
                "total_infection_range": list(seg.total_infection_range),
            }
            for seg in report.segmentation.segments
        ],
    }


def _strong_block_count(knots: np.ndarray, threshold: float) -> int:
    mask = knots >= threshold
    return int(np.sum(mask[1:] & ~mask[:-1]) + (1 if mask[0] else 0))


def structural_signature(schedule: MuSchedule) -> tuple[int | None, int]:
    """(onset knot-block, number of strong blocks): the schedule's shape class.

    Two schedules count as structurally equal when substantial
    intervention (half the schedule's own peak) starts in the same
    biweekly block and the strong level (75% of peak) comes in the same
    number of contiguous pulses.  Unlike the week-resolved descriptor,
    this is stable against the small shoulder knots that stochastic
    search leaves at arbitrary low levels.
    """
    knots = np.asarray(schedule.knots)
    peak = knots.max()
    if peak <= 0.0:
        return (None, 0)
    onset = np.nonzero(knots > 0.5 * peak)[0]
    return (int(onset[0]) if onset.size else None,
            _strong_block_count(knots, 0.75 * peak))


def segment_cops(cost_map: CostOptimalMap, front: ParetoFront) -> CopSegmentation:
    """Merge grid cells whose optimal schedules share a structural shape.

    Boundaries land on discontinuities of the optimal index (cells with
    the same index trivially share a shape); index changes that keep the
    structural signature are merged away.  A shape that is optimal on a
    single grid cell of the sweep is below the map's resolution (a
    near-tie flicker between adjacent front points) and is absorbed into
    the preceding segment.  Each segment carries the full week-resolved
    descriptor of its first optimal schedule.
    """
    grid = cost_map.grid
    idx = cost_map.optimal_index
    signatures = {
        int(k): structural_signature(front.points[int(k)].schedule)
        for k in np.unique(idx)
    }
    runs: list[list[int]] = []  # grid-cell index ranges [start, end)
    start = 0
    for k in range(1, grid.size + 1):
        if k < grid.size and signatures[int(idx[k])] == signatures[int(idx[start])]:
            continue
        runs.append([start, k])
        start = k
    def signature_of_run(run):
        return signatures[int(idx[run[0]])]

    merged: list[list[int]] = []
    for run in runs:
        if merged and run[1] - run[0] == 1 and grid.size > 1:
            merged[-1][1] = run[1]
        elif merged and signature_of_run(merged[-1]) == signature_of_run(run):
            # absorbing an island can reunite the shape on both sides
            merged[-1][1] = run[1]
        else:
            merged.append(run)

    segments = []
    for a, b in merged:
        span = slice(a, b)
        totals = cost_map.optimal_total_cost[span]
        infections = front.f2_values[idx[span]]
        segments.append(CopSegment(
            lo=float(grid[a]),
            hi=float(grid[b - 1]),
            pattern=classify_pattern(front.points[int(idx[a])].schedule),
            representative_index=int(idx[a]),
            total_cost_range=(float(totals.min()), float(totals.max())),
            total_infection_range=(float(infections.min()), float(infections.max())),
        ))
    return CopSegmentation(segments=tuple(segments))
