"""Synthetic calibration worlds with known ground truth."""

from datetime import date, timedelta

import numpy as np

from epicost.calibration import EstimationProblem
from epicost.data import CaseSeries
from epicost.model import (
    DiseaseParams,
    MuSchedule,
    PolicyParams,
    StateVector,
    simulate,
)

TABLE1 = DiseaseParams(r0=2.87, kappa=1 / 4, alpha=1 / 10, gamma=1 / 14, fatality=0.0173)

TRUE_XI = 0.278
TRUE_TAU = 0.6218


def synthetic_problem(
    seed: int = 0,
    n_days: int = 127,
    noise_sd: float = 0.0,
    noise_from_day: int = 28,
    mu_free: tuple[float, ...] = (0.3, 0.5, 0.65, 0.7, 0.6, 0.5, 0.45, 0.4),
    population: float = 51_710_000.0,
) -> tuple[EstimationProblem, np.ndarray]:
    """Generate noisy observations from a known theta and wrap them as a problem.

    Observation noise is i.i.d. Gaussian on the cumulative counts (the
    measurement-error model the L2 likelihood assumes), followed by a
    running-max repair to restore monotonicity.  The first weeks stay
    noiseless: counts there are single digits that would be badly biased
    by the monotone repair, and in reality such small tallies are exact.
    Returns (problem, theta_true).
    """
    horizon = float(n_days - 1)
    knots = (0.0, 0.0) + mu_free
    sched = MuSchedule(knots=knots)
    assert sched.span >= horizon
    policy = PolicyParams(xi=TRUE_XI, tau=TRUE_TAU, schedule=sched)
    traj = simulate(StateVector(s=population), TABLE1, policy, horizon, 0.5)
    days = np.arange(n_days, dtype=float)
    cc = traj.confirmed_at(days)

    if noise_sd > 0.0:
        rng = np.random.default_rng(seed)
        bump = rng.normal(0.0, noise_sd, cc.size)
        bump[:noise_from_day] = 0.0
        cc = np.maximum.accumulate(np.maximum(0.0, cc + bump))

    start = date(2020, 1, 20)
    series = CaseSeries(
        dates=tuple(start + timedelta(days=int(k)) for k in range(n_days)),
        cumulative_confirmed=cc,
    )
    problem = EstimationProblem(disease=TABLE1, population=population, data=series)
    theta_true = np.array([TRUE_XI, TRUE_TAU, *mu_free])
    assert problem.dim == theta_true.size
    return problem, theta_true
