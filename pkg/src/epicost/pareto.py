"""NSGA-II search over transmission-reduction schedules.

Two objectives, both minimized: f1 is the time-average of the reduction
schedule (a proxy for intervention stringency), f2 the epidemic size.
f2 comes in two forms: "incidence" (cumulative new infections, the
integral of lam*S) and "averted" (the reduction-weighted contact flow,
integral of mu*r0*(alpha/(1-tau))*I*S/N).  Fronts from independent runs
can be merged into one global non-dominated set as long as they were
produced for the same problem (checked by provenance hash).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import provenance_hash
from .errors import ConfigError
from .model import (
    CUM_AVERTED,
    CUM_INCIDENCE,
    MU_MAX,
    DiseaseParams,
    MuSchedule,
    mu_time_average,
    simulate_batch,
)

OBJECTIVE_FORMS = ("incidence", "averted")
DEDUP_TOL = 1e-9


@dataclass(frozen=True)
class MooProblem:
    """Fixed scenario with every schedule knot free in [0, 0.95]."""

    disease: DiseaseParams
    xi: float
    tau: float
    population: float
    horizon: float
    step: float = 0.5
    knot_spacing: float = 14.0
    objective_form: str = "incidence"

    def __post_init__(self):
        if self.objective_form not in OBJECTIVE_FORMS:
            raise ConfigError(f"objective_form must be one of {OBJECTIVE_FORMS}")
        if self.horizon <= 0 or self.population <= 0:
            raise ConfigError("horizon and population must be positive")

    @property
    def decision_dim(self) -> int:
        return math.ceil(self.horizon / self.knot_spacing) + 1

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.decision_dim
        return np.zeros(d), np.full(d, MU_MAX)

    def to_dict(self) -> dict:
        return {
            "disease": {
                "r0": self.disease.r0, "kappa": self.disease.kappa,
                "alpha": self.disease.alpha, "gamma": self.disease.gamma,
                "fatality": self.disease.fatality,
            },
            "xi": self.xi, "tau": self.tau, "population": self.population,
            "horizon": self.horizon, "step": self.step,
            "knot_spacing": self.knot_spacing, "objective_form": self.objective_form,
        }

    @property
    def provenance(self) -> str:
        return provenance_hash(self.to_dict())

    def schedule(self, knots: np.ndarray) -> MuSchedule:
        return MuSchedule(knots=tuple(knots), knot_spacing=self.knot_spacing)


@dataclass(frozen=True)
class ParetoPoint:
    f1: float      # average reduction over the horizon
    f2: float      # epidemic-size objective (persons)
    schedule: MuSchedule


@dataclass(frozen=True)
class ParetoFront:
    """Non-dominated points sorted by ascending f1."""

    points: tuple[ParetoPoint, ...]
    provenance: str = ""

    def __post_init__(self):
        f1 = self.f1_values
        f2 = self.f2_values
        if np.any(np.diff(f1) <= 0) or np.any(np.diff(f2) >= 0):
            raise ConfigError(
                "front must be strictly increasing in f1 and decreasing in f2"
            )

    @property
    def f1_values(self) -> np.ndarray:
        return np.array([p.f1 for p in self.points])

    @property
    def f2_values(self) -> np.ndarray:
        return np.array([p.f2 for p in self.points])

    def __len__(self) -> int:
        return len(self.points)


def objectives(schedule: MuSchedule, problem: MooProblem) -> tuple[float, float]:
    """(average reduction, epidemic size) for one schedule."""
    if schedule.span + 1e-9 < problem.horizon:
        raise ConfigError("schedule does not cover the horizon")
    f1 = mu_time_average(schedule, 0.0, problem.horizon)
    f2 = _evaluate_f2(np.asarray(schedule.knots)[None, :], problem)[0]
    return f1, float(f2)


def _evaluate_f2(knot_matrix: np.ndarray, problem: MooProblem) -> np.ndarray:
    nb = knot_matrix.shape[0]
    ones = np.ones(nb)
    d = problem.disease
    _, paths = simulate_batch(
        knots=knot_matrix, knot_spacing=problem.knot_spacing,
        r0=d.r0 * ones, kappa=d.kappa * ones, alpha=d.alpha * ones,
        gamma=d.gamma * ones, fatality=d.fatality * ones,
        xi=problem.xi * ones, tau=problem.tau * ones,
        population=problem.population * ones,
        horizon=problem.horizon, step=problem.step,
    )
    col = CUM_INCIDENCE if problem.objective_form == "incidence" else CUM_AVERTED
    return paths[:, -1, col]


def _batch_objectives(knot_matrix: np.ndarray, problem: MooProblem) -> np.ndarray:
    f2 = _evaluate_f2(knot_matrix, problem)
    f1 = np.array([
        mu_time_average(problem.schedule(row), 0.0, problem.horizon)
        for row in knot_matrix
    ])
    return np.column_stack([f1, f2])


# ------------------------------------------------------------ NSGA-II core

def fast_non_dominated_ranks(F: np.ndarray) -> np.ndarray:
    """Rank 0 = globally non-dominated within F; higher ranks peel inward."""
    n = F.shape[0]
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dom = le & lt                      # dom[i, j]: i dominates j
    n_dominators = dom.sum(axis=0).astype(int)
    ranks = np.full(n, -1, dtype=int)
    current = np.where(n_dominators == 0)[0]
    level = 0
    while current.size:
        ranks[current] = level
        n_dominators[current] = -1
        freed = n_dominators - dom[current].sum(axis=0)
        n_dominators = np.where(n_dominators > 0, freed, n_dominators)
        current = np.where(n_dominators == 0)[0]
        level += 1
    return ranks


def crowding_distance(F: np.ndarray) -> np.ndarray:
    n = F.shape[0]
    dist = np.zeros(n)
    for m in range(F.shape[1]):
        order = np.argsort(F[:, m], kind="stable")
        span = F[order[-1], m] - F[order[0], m]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span > 0 and n > 2:
            dist[order[1:-1]] += (F[order[2:], m] - F[order[:-2], m]) / span
    return dist


def _sbx_crossover(parents: np.ndarray, rng, eta: float = 15.0, p_pair: float = 0.9):
    """Simulated binary crossover on consecutive pairs, per-gene prob 0.5."""
    n, d = parents.shape
    half = n // 2
    x1 = parents[0::2]
    x2 = parents[1::2]
    u = rng.random((half, d))
    beta = np.where(u <= 0.5,
                    (2 * u) ** (1 / (eta + 1)),
                    (1 / (2 * (1 - u))) ** (1 / (eta + 1)))
    c1 = 0.5 * ((1 + beta) * x1 + (1 - beta) * x2)
    c2 = 0.5 * ((1 - beta) * x1 + (1 + beta) * x2)
    swap = rng.random((half, d)) < 0.5
    c1, c2 = np.where(swap, c2, c1), np.where(swap, c1, c2)
    mask = (rng.random((half, 1)) <= p_pair) & (rng.random((half, d)) <= 0.5)
    out = np.empty_like(parents)
    out[0::2] = np.where(mask, c1, x1)
    out[1::2] = np.where(mask, c2, x2)
    return out


def _polynomial_mutation(X: np.ndarray, lower, upper, rng, eta: float = 20.0):
    """Boundary-aware polynomial mutation; steps shrink near the box edges
    so variables can settle on a bound (requires X inside the box)."""
    n, d = X.shape
    span = upper - lower
    mask = rng.random((n, d)) < (1.0 / d)
    u = rng.random((n, d))
    d_lo = (X - lower) / span
    d_hi = (upper - X) / span
    delta = np.where(
        u < 0.5,
        (2 * u + (1 - 2 * u) * (1 - d_lo) ** (eta + 1)) ** (1 / (eta + 1)) - 1,
        1 - (2 * (1 - u) + 2 * (u - 0.5) * (1 - d_hi) ** (eta + 1)) ** (1 / (eta + 1)),
    )
    return np.clip(np.where(mask, X + delta * span, X), lower, upper)


def _reflect(X: np.ndarray, lower, upper) -> np.ndarray:
    for _ in range(2):
        X = np.where(X < lower, 2 * lower - X, X)
        X = np.where(X > upper, 2 * upper - X, X)
    return np.clip(X, lower, upper)


def nsga2(fn, lower: np.ndarray, upper: np.ndarray, population: int,
          generations: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Standard elitist NSGA-II; returns the final population and objectives.

    fn maps an (n, d) candidate block to (n, m) objective values (all
    minimized).  population must be even and at least 20.
    """
    if population < 20 or population % 2:
        raise ConfigError("population must be even and >= 20")
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    rng = np.random.default_rng(seed)
    d = lower.size

    X = lower + rng.random((population, d)) * (upper - lower)
    F = np.asarray(fn(X), float)

    for _ in range(generations):
        ranks = fast_non_dominated_ranks(F)
        crowd = crowding_distance_by_front(F, ranks)
        a = rng.integers(0, population, population)
        b = rng.integers(0, population, population)
        better = (ranks[a] < ranks[b]) | ((ranks[a] == ranks[b]) & (crowd[a] > crowd[b]))
        parents = X[np.where(better, a, b)]
        children = _reflect(_sbx_crossover(parents, rng), lower, upper)
        children = _polynomial_mutation(children, lower, upper, rng)
        Fc = np.asarray(fn(children), float)

        X_all = np.vstack([X, children])
        F_all = np.vstack([F, Fc])
        ranks_all = fast_non_dominated_ranks(F_all)
        crowd_all = crowding_distance_by_front(F_all, ranks_all)
        # fill by (rank asc, crowding desc); stable lexsort keeps determinism
        order = np.lexsort((-crowd_all, ranks_all))
        keep = order[:population]
        X, F = X_all[keep], F_all[keep]

    return X, F


def crowding_distance_by_front(F: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    crowd = np.zeros(F.shape[0])
    for level in np.unique(ranks):
        idx = np.where(ranks == level)[0]
        crowd[idx] = crowding_distance(F[idx])
    return crowd


# -------------------------------------------------------- front assembly

def non_dominated_filter(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """Global non-dominated subset, sorted by f1, de-duplicated."""
    if not points:
        return []
    ordered = sorted(points, key=lambda p: (p.f1, p.f2))
    kept: list[ParetoPoint] = []
    best_f2 = np.inf
    for p in ordered:
        if p.f2 < best_f2:
            if kept and abs(p.f1 - kept[-1].f1) <= DEDUP_TOL \
                    and abs(p.f2 - kept[-1].f2) <= DEDUP_TOL:
                continue  # same point to within objective-space noise
            kept.append(p)
            best_f2 = p.f2
    return kept


def nsga2_run(problem: MooProblem, population: int = 100, generations: int = 200,
              seed: int = 0) -> ParetoFront:
    """One NSGA-II run; returns the rank-0 set of its final population."""
    lower, upper = problem.bounds
    X, F = nsga2(lambda block: _batch_objectives(block, problem),
                 lower, upper, population, generations, seed)
    ranks = fast_non_dominated_ranks(F)
    points = []
    for row in X[ranks == 0]:
        sched = problem.schedule(row)
        # store f1 recomputed from the schedule so the stored value always
        # reproduces from the artifact
        f1 = mu_time_average(sched, 0.0, problem.horizon)
        points.append(ParetoPoint(f1=f1, f2=float(
            _evaluate_f2(row[None, :], problem)[0]), schedule=sched))
    return ParetoFront(points=tuple(non_dominated_filter(points)),
                       provenance=problem.provenance)


def _run_with_seed(args) -> ParetoFront:
    problem, population, generations, seed = args
    return nsga2_run(problem, population, generations, seed)


def optimize_many(problem: MooProblem, runs: int = 100, population: int = 100,
                  generations: int = 200, seed: int = 0,
                  workers: int = 1) -> ParetoFront:
    """Independent NSGA-II runs merged into one assembled front."""
    jobs = [(problem, population, generations, seed + k) for k in range(runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fronts = list(pool.map(_run_with_seed, jobs))
    else:
        fronts = [_run_with_seed(job) for job in jobs]
    return assemble_front(fronts)


def assemble_front(runs: list[ParetoFront]) -> ParetoFront:
    """Union of run fronts filtered to the global non-dominated set."""
    if not runs:
        raise ConfigError("no fronts to assemble")
    provenance = runs[0].provenance
    for front in runs[1:]:
        if front.provenance != provenance:
            raise ConfigError("fronts come from different problems")
    merged: list[ParetoPoint] = []
    for front in runs:
        merged.extend(front.points)
    return ParetoFront(points=tuple(non_dominated_filter(merged)),
                       provenance=provenance)


def select_by_f2_fraction(front: ParetoFront, fraction: float,
                          population: float) -> ParetoPoint:
    """Front point whose epidemic size is nearest fraction * population."""
    if not front.points:
        raise ConfigError("empty front")
    target = fraction * population
    f2 = front.f2_values
    lo, hi = f2.min(), f2.max()
    if not lo <= target <= hi:
        raise ConfigError(
            f"target {target:.6g} persons outside attainable range [{lo:.6g}, {hi:.6g}]"
        )
    return front.points[int(np.argmin(np.abs(f2 - target)))]


def front_to_payload(front: ParetoFront) -> dict:
    """JSON-ready body for a front artifact."""
    return {
        "points": [
            {
                "f1": p.f1,
                "f2": p.f2,
                "schedule": {
                    "knot_spacing": p.schedule.knot_spacing,
                    "knots": list(p.schedule.knots),
                },
            }
            for p in front.points
        ],
    }


def front_from_payload(payload: dict, provenance: str) -> ParetoFront:
    points = tuple(
        ParetoPoint(
            f1=entry["f1"],
            f2=entry["f2"],
            schedule=MuSchedule(
                knots=tuple(entry["schedule"]["knots"]),
                knot_spacing=entry["schedule"]["knot_spacing"],
            ),
        )
        for entry in payload["points"]
    )
    return ParetoFront(points=points, provenance=provenance)


def hypervolume(front: ParetoFront, reference: tuple[float, float]) -> float:
    """Dominated area between the front and a reference point (minimization)."""
    rx, ry = reference
    area = 0.0
    prev_f2 = ry
    for p in front.points:
        if p.f1 >= rx or p.f2 >= prev_f2:
            continue
        area += (rx - p.f1) * (prev_f2 - p.f2)
        prev_f2 = p.f2
    return area
