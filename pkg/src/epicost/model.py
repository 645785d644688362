"""Deterministic SEIQRD dynamics with time-varying transmission reduction.

Compartments: susceptible S, exposed/latent E, infectious I, isolated Q,
recovered R, deceased D.  The force of infection is

    lam(t) = (1 - mu(t)) * r0 * (alpha / (1 - tau)) * I / N,   N = S + E + I + R,

where mu(t) is a piecewise-linear transmission-reduction level anchored at
biweekly knots, tau shortens the effective infectious period (outflow
alpha/(1-tau) from I to Q), and a constant importation flow xi enters E.

Alongside the six compartments the integrator accumulates three running
integrals: cumulative confirmed cases (integral of alpha/(1-tau)*I),
cumulative incidence (integral of lam*S, the new-infection flow), and the
mu-weighted contact flow (integral of mu*r0*(alpha/(1-tau))*I*S/N, the
infections averted by the intervention at prevailing prevalence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, DegeneratePopulationError, ScheduleRangeError

MU_MAX = 0.95

# Column layout of integrator output.
S, E, I, Q, R, D = range(6)
CUM_CONFIRMED, CUM_INCIDENCE, CUM_AVERTED = 6, 7, 8
N_COLS = 9


@dataclass(frozen=True)
class DiseaseParams:
    """Fixed epidemiological constants.

    r0: basic reproduction number (dimensionless)
    kappa: inverse mean latent period (1/day)
    alpha: inverse mean infectious period (1/day)
    gamma: inverse mean isolation period (1/day)
    fatality: probability of death per confirmed case, in [0, 1]
    """

    r0: float
    kappa: float
    alpha: float
    gamma: float
    fatality: float

    def __post_init__(self):
        if min(self.r0, self.kappa, self.alpha, self.gamma) <= 0.0:
            raise ConfigError("r0, kappa, alpha, gamma must be strictly positive")
        if not 0.0 <= self.fatality <= 1.0:
            raise ConfigError(f"fatality must lie in [0, 1], got {self.fatality}")


@dataclass(frozen=True)
class MuSchedule:
    """Transmission-reduction levels at evenly spaced knots.

    knots[j] is the reduction at t = j * knot_spacing; mu(t) interpolates
    linearly between consecutive knots.  Every level must lie in [0, 0.95].
    """

    knots: tuple[float, ...]
    knot_spacing: float = 14.0

    def __post_init__(self):
        object.__setattr__(self, "knots", tuple(float(k) for k in self.knots))
        if len(self.knots) == 0:
            raise ConfigError("schedule needs at least one knot")
        if self.knot_spacing <= 0.0:
            raise ConfigError("knot_spacing must be positive")
        bad = [k for k in self.knots if not 0.0 <= k <= MU_MAX]
        if bad:
            raise ConfigError(f"knot levels outside [0, {MU_MAX}]: {bad[:3]}")

    @property
    def span(self) -> float:
        """Last time covered by the schedule, in days."""
        return (len(self.knots) - 1) * self.knot_spacing

    @staticmethod
    def constant(level: float, horizon: float, knot_spacing: float = 14.0) -> "MuSchedule":
        n = max(2, math.ceil(horizon / knot_spacing) + 1)
        return MuSchedule(knots=(level,) * n, knot_spacing=knot_spacing)


@dataclass(frozen=True)
class PolicyParams:
    """Policy-related inputs: importation, infectious-period reduction, schedule.

    xi: mean imported cases per day (>= 0)
    tau: infectious-period reduction in [0, 1); enters as alpha/(1-tau)
    """

    xi: float
    tau: float
    schedule: MuSchedule

    def __post_init__(self):
        if self.xi < 0.0:
            raise ConfigError("xi must be non-negative")
        if not 0.0 <= self.tau < 1.0:
            raise ConfigError("tau must lie in [0, 1); tau = 1 is singular")


@dataclass(frozen=True)
class StateVector:
    """Compartment occupancies (persons) at time t (days)."""

    s: float
    e: float = 0.0
    i: float = 0.0
    q: float = 0.0
    r: float = 0.0
    d: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if min(self.s, self.e, self.i, self.q, self.r, self.d) < 0.0:
            raise ConfigError("compartments must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.e, self.i, self.q, self.r, self.d])

    @property
    def total(self) -> float:
        return self.s + self.e + self.i + self.q + self.r + self.d


@dataclass(frozen=True)
class ScenarioConfig:
    """A complete simulation setup: who, what disease, which policy."""

    disease: DiseaseParams
    policy: PolicyParams
    population: float
    horizon: float
    step: float = 0.5

    def __post_init__(self):
        if self.population <= 0.0:
            raise ConfigError("population must be positive")
        if self.horizon <= 0.0 or self.step <= 0.0:
            raise ConfigError("horizon and step must be positive")

    def initial_state(self) -> StateVector:
        # Outbreak triggered purely by importation: everyone susceptible.
        return StateVector(s=self.population)


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed SEIQRD states plus derived cumulative observables."""

    times: np.ndarray                 # (T,) days, strictly increasing
    states: np.ndarray                # (T, 6) persons, columns S..D
    cumulative_confirmed: np.ndarray  # (T,) integral of alpha/(1-tau)*I
    cumulative_incidence: np.ndarray  # (T,) integral of lam*S
    cumulative_averted: np.ndarray    # (T,) integral of mu*r0*alpha/(1-tau)*I*S/N

    def confirmed_at(self, days: np.ndarray) -> np.ndarray:
        return np.interp(days, self.times, self.cumulative_confirmed)

    def incidence_at(self, days: np.ndarray) -> np.ndarray:
        return np.interp(days, self.times, self.cumulative_incidence)

    @property
    def final_confirmed(self) -> float:
        return float(self.cumulative_confirmed[-1])

    @property
    def final_incidence(self) -> float:
        return float(self.cumulative_incidence[-1])


def mu_at(schedule: MuSchedule, t: float) -> float:
    """Transmission reduction at time t, linear between knots."""
    span = schedule.span
    if t < 0.0 or t > span + 1e-9:
        raise ScheduleRangeError(
            f"t={t} outside schedule span [0, {span}]"
        )
    return float(_mu_interp(np.asarray(schedule.knots), schedule.knot_spacing, t))


def mu_time_average(schedule: MuSchedule, t0: float, tf: float) -> float:
    """Exact time-average of mu(t) over [t0, tf] (trapezoid on breakpoints)."""
    if tf <= t0:
        raise ConfigError("need tf > t0")
    sp = schedule.knot_spacing
    first = math.floor(t0 / sp) + 1
    last = math.ceil(tf / sp) - 1
    ts = [t0] + [j * sp for j in range(first, last + 1) if t0 < j * sp < tf] + [tf]
    vals = [mu_at(schedule, t) for t in ts]
    # Accumulate deviations from the first value so a flat schedule averages
    # to exactly that value, free of summation roundoff.
    base = vals[0]
    area = 0.0
    for a in range(len(ts) - 1):
        area += (ts[a + 1] - ts[a]) * ((vals[a] - base) + (vals[a + 1] - base)) / 2.0
    return base + area / (tf - t0)


def force_of_infection(
    state: StateVector, params: DiseaseParams, policy: PolicyParams, t: float
) -> float:
    """Per-susceptible infection rate lam(t), 1/day."""
    n = state.s + state.e + state.i + state.r
    if n <= 0.0:
        raise DegeneratePopulationError("S + E + I + R must be positive")
    mu = mu_at(policy.schedule, t)
    return (1.0 - mu) * params.r0 * (params.alpha / (1.0 - policy.tau)) * state.i / n


def derivatives(
    state: StateVector, params: DiseaseParams, policy: PolicyParams, t: float
) -> np.ndarray:
    """Compartment rates (persons/day); components sum to xi exactly.

    An empty population is fine here (importation still flows into E);
    the infection term lam*S is zero whenever S or I is zero.
    """
    n = state.s + state.e + state.i + state.r
    if n > 0.0:
        lam = force_of_infection(state, params, policy, t)
    else:
        lam = 0.0
    aeff = params.alpha / (1.0 - policy.tau)
    inflow_q = aeff * state.i
    outflow_q = params.gamma * state.q
    return np.array([
        -lam * state.s,
        lam * state.s - params.kappa * state.e + policy.xi,
        params.kappa * state.e - inflow_q,
        inflow_q - outflow_q,
        (1.0 - params.fatality) * outflow_q,
        params.fatality * outflow_q,
    ])


def simulate(
    initial: StateVector,
    params: DiseaseParams,
    policy: PolicyParams,
    horizon: float,
    step: float = 0.5,
) -> Trajectory:
    """Integrate the SEIQRD system with fixed-step classical Runge-Kutta.

    The three cumulative observables are advanced inside the same RK4
    stages as the compartments, so they share the integrator's quadrature
    accuracy.  Tiny negative overshoots near zero are clamped after each
    step; the cumulative series are kept monotone.
    """
    if horizon <= 0.0 or step <= 0.0:
        raise ConfigError("horizon and step must be positive")
    if policy.schedule.span + 1e-9 < horizon:
        raise ConfigError(
            f"schedule spans {policy.schedule.span} days but horizon is {horizon}"
        )
    n_steps = int(round(horizon / step))
    if abs(n_steps * step - horizon) > 1e-9 * max(1.0, horizon):
        raise ConfigError(f"step {step} must evenly divide horizon {horizon}")

    y0 = np.zeros((1, N_COLS))
    y0[0, :6] = initial.as_array()
    knots = np.asarray(policy.schedule.knots)[None, :]
    ones = np.ones(1)
    paths = _integrate_kernel(
        y0, knots, policy.schedule.knot_spacing,
        params.r0 * ones, params.kappa * ones, params.alpha * ones,
        params.gamma * ones, params.fatality * ones,
        policy.xi * ones, policy.tau * ones,
        n_steps, step,
    )
    times = initial.t + step * np.arange(n_steps + 1)
    p = paths[0]
    return Trajectory(
        times=times,
        states=p[:, :6].copy(),
        cumulative_confirmed=p[:, CUM_CONFIRMED].copy(),
        cumulative_incidence=p[:, CUM_INCIDENCE].copy(),
        cumulative_averted=p[:, CUM_AVERTED].copy(),
    )


def simulate_scenario(cfg: ScenarioConfig) -> Trajectory:
    return simulate(cfg.initial_state(), cfg.disease, cfg.policy, cfg.horizon, cfg.step)


def simulate_batch(
    knots: np.ndarray,
    knot_spacing: float,
    r0: np.ndarray,
    kappa: np.ndarray,
    alpha: np.ndarray,
    gamma: np.ndarray,
    fatality: np.ndarray,
    xi: np.ndarray,
    tau: np.ndarray,
    population: np.ndarray,
    horizon: float,
    step: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate many parameter sets at once.

    All parameter arrays have shape (B,); knots has shape (B, K).  Initial
    state is S = population, all other compartments empty.  Returns
    (times (T,), paths (B, T, 9)) with the column layout of this module.
    Used by the calibration, sensitivity, and schedule-optimization loops,
    where whole populations of candidates are evaluated per generation.
    """
    nb = knots.shape[0]
    n_steps = int(round(horizon / step))
    y0 = np.zeros((nb, N_COLS))
    y0[:, S] = population
    paths = _integrate_kernel(
        np.ascontiguousarray(y0), np.ascontiguousarray(knots, dtype=np.float64),
        float(knot_spacing),
        np.ascontiguousarray(r0, dtype=np.float64),
        np.ascontiguousarray(kappa, dtype=np.float64),
        np.ascontiguousarray(alpha, dtype=np.float64),
        np.ascontiguousarray(gamma, dtype=np.float64),
        np.ascontiguousarray(fatality, dtype=np.float64),
        np.ascontiguousarray(xi, dtype=np.float64),
        np.ascontiguousarray(tau, dtype=np.float64),
        n_steps, float(step),
    )
    times = step * np.arange(n_steps + 1)
    return times, paths


@njit(cache=True, inline="always")
def _mu_interp(kn, spacing, t):
    pos = t / spacing
    idx = int(math.floor(pos))
    last = kn.shape[0] - 1
    if idx < 0:
        return kn[0]
    if idx >= last:
        return kn[last]
    frac = pos - idx
    return kn[idx] + frac * (kn[idx + 1] - kn[idx])


@njit(cache=True)
def _integrate_kernel(y0, knots, spacing, r0, kappa, alpha, gamma, fatality,
                      xi, tau, n_steps, dt):
    nb = y0.shape[0]
    out = np.empty((nb, n_steps + 1, 9))
    for b in range(nb):
        kn = knots[b]
        rv = r0[b]
        kap = kappa[b]
        aeff = alpha[b] / (1.0 - tau[b])
        gam = gamma[b]
        fat = fatality[b]
        xiv = xi[b]

        s = y0[b, 0]; e = y0[b, 1]; i = y0[b, 2]
        q = y0[b, 3]; r = y0[b, 4]; d = y0[b, 5]
        cc = y0[b, 6]; ci = y0[b, 7]; ca = y0[b, 8]
        out[b, 0, 0] = s; out[b, 0, 1] = e; out[b, 0, 2] = i
        out[b, 0, 3] = q; out[b, 0, 4] = r; out[b, 0, 5] = d
        out[b, 0, 6] = cc; out[b, 0, 7] = ci; out[b, 0, 8] = ca

        for k in range(n_steps):
            t = k * dt
            # Stage 1
            mu = _mu_interp(kn, spacing, t)
            n = s + e + i + r
            lam = 0.0 if n <= 0.0 else (1.0 - mu) * rv * aeff * i / n
            w = 0.0 if n <= 0.0 else mu * rv * aeff * i * s / n
            k1s = -lam * s
            k1e = lam * s - kap * e + xiv
            k1i = kap * e - aeff * i
            k1q = aeff * i - gam * q
            k1r = (1.0 - fat) * gam * q
            k1d = fat * gam * q
            k1cc = aeff * i
            k1ci = lam * s
            k1ca = w
            # Stage 2
            h2 = dt / 2.0
            s2 = s + h2 * k1s; e2 = e + h2 * k1e; i2 = i + h2 * k1i
            q2 = q + h2 * k1q; r2 = r + h2 * k1r
            mu = _mu_interp(kn, spacing, t + h2)
            n = s2 + e2 + i2 + r2
            lam = 0.0 if n <= 0.0 else (1.0 - mu) * rv * aeff * i2 / n
            w = 0.0 if n <= 0.0 else mu * rv * aeff * i2 * s2 / n
            k2s = -lam * s2
            k2e = lam * s2 - kap * e2 + xiv
            k2i = kap * e2 - aeff * i2
            k2q = aeff * i2 - gam * q2
            k2r = (1.0 - fat) * gam * q2
            k2d = fat * gam * q2
            k2cc = aeff * i2
            k2ci = lam * s2
            k2ca = w
            # Stage 3
            s3 = s + h2 * k2s; e3 = e + h2 * k2e; i3 = i + h2 * k2i
            q3 = q + h2 * k2q; r3 = r + h2 * k2r
            n = s3 + e3 + i3 + r3
            lam = 0.0 if n <= 0.0 else (1.0 - mu) * rv * aeff * i3 / n
            w = 0.0 if n <= 0.0 else mu * rv * aeff * i3 * s3 / n
            k3s = -lam * s3
            k3e = lam * s3 - kap * e3 + xiv
            k3i = kap * e3 - aeff * i3
            k3q = aeff * i3 - gam * q3
            k3r = (1.0 - fat) * gam * q3
            k3d = fat * gam * q3
            k3cc = aeff * i3
            k3ci = lam * s3
            k3ca = w
            # Stage 4
            s4 = s + dt * k3s; e4 = e + dt * k3e; i4 = i + dt * k3i
            q4 = q + dt * k3q; r4 = r + dt * k3r
            mu = _mu_interp(kn, spacing, t + dt)
            n = s4 + e4 + i4 + r4
            lam = 0.0 if n <= 0.0 else (1.0 - mu) * rv * aeff * i4 / n
            w = 0.0 if n <= 0.0 else mu * rv * aeff * i4 * s4 / n
            k4s = -lam * s4
            k4e = lam * s4 - kap * e4 + xiv
            k4i = kap * e4 - aeff * i4
            k4q = aeff * i4 - gam * q4
            k4r = (1.0 - fat) * gam * q4
            k4d = fat * gam * q4
            k4cc = aeff * i4
            k4ci = lam * s4
            k4ca = w

            h6 = dt / 6.0
            s += h6 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
            e += h6 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e)
            i += h6 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
            q += h6 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
            r += h6 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
            d += h6 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
            ncc = cc + h6 * (k1cc + 2.0 * k2cc + 2.0 * k3cc + k4cc)
            nci = ci + h6 * (k1ci + 2.0 * k2ci + 2.0 * k3ci + k4ci)
            nca = ca + h6 * (k1ca + 2.0 * k2ca + 2.0 * k3ca + k4ca)

            # RK4 stages can momentarily overshoot below zero near empty
            # compartments; clamp, and keep the running integrals monotone.
            if s < 0.0:
                s = 0.0
            if e < 0.0:
                e = 0.0
            if i < 0.0:
                i = 0.0
            if q < 0.0:
                q = 0.0
            if r < 0.0:
                r = 0.0
            if d < 0.0:
                d = 0.0
            cc = ncc if ncc > cc else cc
            ci = nci if nci > ci else ci
            ca = nca if nca > ca else ca

            out[b, k + 1, 0] = s; out[b, k + 1, 1] = e; out[b, k + 1, 2] = i
            out[b, k + 1, 3] = q; out[b, k + 1, 4] = r; out[b, k + 1, 5] = d
            out[b, k + 1, 6] = cc; out[b, k + 1, 7] = ci; out[b, k + 1, 8] = ca
    return out
