"""Policy-parameter estimation from cumulative confirmed cases.

Two-stage scheme: an adaptive multi-operator differential evolution finds
the best-fit point, then a delayed-rejection adaptive-Metropolis (DRAM)
chain refines it into a posterior with a tight normal prior centered on
the DE result.

The estimated vector theta is laid out as (xi, tau, mu_2 .. mu_{K-1}):
importation rate, infectious-period reduction, and the free schedule
knots.  The first two knots are pinned to zero (no detected cases in the
first two weeks of the fitting window).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .data import CaseSeries
from .errors import ConfigError
from .model import MU_MAX, CUM_CONFIRMED, DiseaseParams, simulate_batch

N_PINNED_KNOTS = 2
DEFAULT_PRIOR_SD = 0.05
DEFAULT_CHAIN_LENGTH = 1_000_000
CHAIN_THIN = 100


@dataclass(frozen=True)
class ParamSpec:
    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ConfigError(f"{self.name}: bounds must be finite")
        if not self.lower < self.upper:
            raise ConfigError(f"{self.name}: need lower < upper")


@dataclass(frozen=True)
class EstimationProblem:
    """Fit (xi, tau, free mu knots) to a daily cumulative-confirmed series."""

    disease: DiseaseParams
    population: float
    data: CaseSeries
    xi_max: float = 10.0
    tau_max: float = MU_MAX
    knot_spacing: float = 14.0
    step: float = 0.5
    loss_kind: str = "l2_cumulative"

    def __post_init__(self):
        if self.data.n_days < 2:
            raise ConfigError("need at least two observed days")
        if self.loss_kind != "l2_cumulative":
            raise ConfigError(f"unsupported loss {self.loss_kind!r}")
        steps_per_day = 1.0 / self.step
        if abs(steps_per_day - round(steps_per_day)) > 1e-9:
            raise ConfigError("step must evenly divide one day")

    @property
    def horizon(self) -> float:
        return float(self.data.n_days - 1)

    @property
    def n_knots(self) -> int:
        return math.ceil(self.horizon / self.knot_spacing) + 1

    @property
    def theta_spec(self) -> tuple[ParamSpec, ...]:
        mu_specs = tuple(
            ParamSpec(f"mu_{j}", 0.0, MU_MAX)
            for j in range(N_PINNED_KNOTS, self.n_knots)
        )
        return (ParamSpec("xi", 0.0, self.xi_max),
                ParamSpec("tau", 0.0, self.tau_max)) + mu_specs

    @property
    def dim(self) -> int:
        return 2 + self.n_knots - N_PINNED_KNOTS

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        spec = self.theta_spec
        return (np.array([p.lower for p in spec]), np.array([p.upper for p in spec]))

    def knots_matrix(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.atleast_2d(thetas)
        knots = np.zeros((thetas.shape[0], self.n_knots))
        knots[:, N_PINNED_KNOTS:] = thetas[:, 2:]
        return knots

    def simulate_confirmed(self, thetas: np.ndarray) -> np.ndarray:
        """Daily simulated cumulative confirmed cases, one row per theta."""
        thetas = np.atleast_2d(thetas)
        nb = thetas.shape[0]
        ones = np.ones(nb)
        _, paths = simulate_batch(
            knots=self.knots_matrix(thetas),
            knot_spacing=self.knot_spacing,
            r0=self.disease.r0 * ones,
            kappa=self.disease.kappa * ones,
            alpha=self.disease.alpha * ones,
            gamma=self.disease.gamma * ones,
            fatality=self.disease.fatality * ones,
            xi=thetas[:, 0],
            tau=thetas[:, 1],
            population=self.population * ones,
            horizon=self.horizon,
            step=self.step,
        )
        per_day = int(round(1.0 / self.step))
        return paths[:, ::per_day, CUM_CONFIRMED]


@dataclass(frozen=True)
class Estimate:
    theta: np.ndarray
    loss_value: float
    evaluations_used: int

    def __post_init__(self):
        if self.loss_value < 0:
            raise ConfigError("loss must be non-negative")


@dataclass(frozen=True)
class Chain:
    samples: np.ndarray          # (iterations, dim)
    log_posterior: np.ndarray    # (iterations,)
    acceptance_rate: float
    burn_in: int
    names: tuple[str, ...] = ()

    @property
    def posterior(self) -> np.ndarray:
        return self.samples[self.burn_in:]


@dataclass(frozen=True)
class ChainDiagnostics:
    names: tuple[str, ...]
    means: np.ndarray
    ci_lower: np.ndarray         # 2.5th percentile
    ci_upper: np.ndarray         # 97.5th percentile
    correlation: np.ndarray      # Pearson, post burn-in
    zero_variance: tuple[str, ...]


# ------------------------------------------------------------------ loss

def loss_batch(thetas: np.ndarray, problem: EstimationProblem) -> np.ndarray:
    """Trapezoid-weighted L2 distance to the observed cumulative series."""
    thetas = np.atleast_2d(thetas)
    sim = problem.simulate_confirmed(thetas)
    resid = sim - problem.data.cumulative_confirmed[None, :]
    w = np.ones(problem.data.n_days)
    w[0] = w[-1] = 0.5
    values = np.sqrt(np.maximum(0.0, (resid**2 * w).sum(axis=1)))
    # simulation blow-ups must not look attractive to the optimizer
    values[~np.isfinite(values)] = np.inf
    return values


def loss(theta: np.ndarray, problem: EstimationProblem) -> float:
    return float(loss_batch(theta[None, :], problem)[0])


def rms_residual(theta: np.ndarray, problem: EstimationProblem) -> float:
    sim = problem.simulate_confirmed(theta[None, :])[0]
    return float(np.sqrt(np.mean((sim - problem.data.cumulative_confirmed) ** 2)))


# ------------------------------------------------- differential evolution

def de_minimize(
    fn,
    lower: np.ndarray,
    upper: np.ndarray,
    budget: int,
    seed: int,
    pop_init: int | None = None,
    pop_min: int = 4,
) -> tuple[np.ndarray, float, int]:
    """Adaptive multi-operator differential evolution with population reduction.

    fn is a batch objective mapping (n, d) candidates to (n,) losses.
    Three mutation operators (rand/1, best/1, current-to-best/1) compete;
    their selection probabilities adapt to recent success rates, and F/CR
    are drawn from success-history memories.  The population shrinks
    linearly from pop_init to pop_min over the evaluation budget, shifting
    effort from exploration to exploitation.  Candidates are kept inside
    the box by reflection.  Replacement is strictly-less, so ties keep the
    incumbent and runs are reproducible for a given seed.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    d = lower.size
    if pop_init is None:
        pop_init = min(100, max(24, 6 * d))
    if budget < pop_init * 10:
        raise ConfigError(f"budget {budget} too small for population {pop_init}")

    rng = np.random.default_rng(seed)
    n_ops = 3
    p_op = np.full(n_ops, 1.0 / n_ops)
    mem_size = 6
    mem_f = np.full((n_ops, mem_size), 0.5)
    mem_cr = np.full((n_ops, mem_size), 0.7)
    mem_ptr = np.zeros(n_ops, dtype=int)

    pop = lower + rng.random((pop_init, d)) * (upper - lower)
    fitness = np.asarray(fn(pop), dtype=float)
    evals = pop_init

    while evals < budget:
        n = pop.shape[0]
        best_idx = int(np.argmin(fitness))
        ops = rng.choice(n_ops, size=n, p=p_op)
        slots = rng.integers(0, mem_size, size=n)
        f_vals = np.empty(n)
        for k in range(n):
            fv = mem_f[ops[k], slots[k]] + 0.1 * rng.standard_cauchy()
            while fv <= 0.0:
                fv = mem_f[ops[k], slots[k]] + 0.1 * rng.standard_cauchy()
            f_vals[k] = min(fv, 1.0)
        cr_vals = np.clip(rng.normal(mem_cr[ops, slots], 0.1), 0.0, 1.0)

        r = rng.integers(0, n, size=(n, 3))
        for k in range(n):  # distinct donors, cheap fix-up loop
            while r[k, 0] == k or r[k, 1] == k or r[k, 2] == k \
                    or r[k, 0] == r[k, 1] or r[k, 1] == r[k, 2] or r[k, 0] == r[k, 2]:
                r[k] = rng.integers(0, n, size=3)

        fcol = f_vals[:, None]
        v_rand = pop[r[:, 0]] + fcol * (pop[r[:, 1]] - pop[r[:, 2]])
        v_best = pop[best_idx] + fcol * (pop[r[:, 0]] - pop[r[:, 1]])
        v_ctb = pop + fcol * (pop[best_idx] - pop) + fcol * (pop[r[:, 0]] - pop[r[:, 1]])
        mutant = np.where((ops == 0)[:, None], v_rand,
                          np.where((ops == 1)[:, None], v_best, v_ctb))

        cross = rng.random((n, d)) < cr_vals[:, None]
        cross[np.arange(n), rng.integers(0, d, size=n)] = True
        trial = np.where(cross, mutant, pop)
        # reflect into the box (twice handles any overshoot from F <= 1)
        for _ in range(2):
            trial = np.where(trial < lower, 2.0 * lower - trial, trial)
            trial = np.where(trial > upper, 2.0 * upper - trial, trial)
        trial = np.clip(trial, lower, upper)

        if evals + n > budget:
            n_eval = budget - evals
            trial = trial[:n_eval]
        else:
            n_eval = n
        trial_fit = np.asarray(fn(trial), dtype=float)
        evals += n_eval

        improved = trial_fit < fitness[:n_eval]
        rates = np.zeros(n_ops)
        for k in range(n_ops):
            used = (ops[:n_eval] == k)
            if used.any():
                ok = improved & used
                rates[k] = ok.sum() / used.sum()
                if ok.any():
                    gain = fitness[:n_eval][ok] - trial_fit[ok]
                    wts = gain / gain.sum() if gain.sum() > 0 else np.full(ok.sum(), 1.0 / ok.sum())
                    fs = f_vals[:n_eval][ok]
                    mem_f[k, mem_ptr[k]] = (wts * fs**2).sum() / max((wts * fs).sum(), 1e-12)
                    mem_cr[k, mem_ptr[k]] = (wts * cr_vals[:n_eval][ok]).sum()
                    mem_ptr[k] = (mem_ptr[k] + 1) % mem_size
        if rates.sum() > 0:
            p_op = 0.8 * p_op + 0.2 * (rates + 1e-3) / (rates + 1e-3).sum()
            p_op = np.maximum(p_op, 0.1 / n_ops)
            p_op /= p_op.sum()

        fitness[:n_eval] = np.where(improved, trial_fit, fitness[:n_eval])
        pop[:n_eval] = np.where(improved[:, None], trial, pop[:n_eval])

        # linear population-size reduction: drop the worst members
        target = max(pop_min, round(pop_init + (pop_min - pop_init) * evals / budget))
        if target < n:
            keep = np.argsort(fitness, kind="stable")[:target]
            pop = pop[keep]
            fitness = fitness[keep]

    best = int(np.argmin(fitness))
    return pop[best].copy(), float(fitness[best]), evals


def de_optimize(problem: EstimationProblem, budget: int, seed: int) -> Estimate:
    lower, upper = problem.bounds
    theta, value, used = de_minimize(
        lambda X: loss_batch(X, problem), lower, upper, budget, seed
    )
    return Estimate(theta=theta, loss_value=value, evaluations_used=used)


def run_restarts(
    problem: EstimationProblem,
    restarts: int = 25,
    budget_each: int = 100_000,
    seed: int = 0,
) -> tuple[list[Estimate], Estimate]:
    """Independent restarts; returns all estimates and the best one."""
    if restarts < 1:
        raise ConfigError("need at least one restart")
    estimates = [de_optimize(problem, budget_each, seed + k) for k in range(restarts)]
    best = min(estimates, key=lambda est: est.loss_value)
    return estimates, best


# ----------------------------------------------------------------- DRAM

def dram(
    log_post,
    x0: np.ndarray,
    iterations: int,
    seed: int,
    cov0: np.ndarray | None = None,
    adapt_start: int = 200,
    adapt_interval: int = 50,
    dr_scale: float = 0.4,
    cov_eps: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Adaptive-Metropolis sampler with one delayed-rejection stage.

    The proposal covariance adapts to the running sample covariance
    (scaled by 2.4^2/d); when a first-stage draw is rejected a shrunk
    second-stage proposal is tried with the standard DR acceptance ratio.
    log_post must return -inf outside the support.  Returns (samples,
    log posterior values, acceptance rate).
    """
    x = np.asarray(x0, dtype=float).copy()
    d = x.size
    lp = float(log_post(x))
    if not np.isfinite(lp):
        raise ConfigError("log posterior not finite at the initial point")

    rng = np.random.default_rng(seed)
    sd = 2.4**2 / d
    if cov0 is None:
        cov0 = np.eye(d) * 0.01
    chol = np.linalg.cholesky(cov0)

    mean = x.copy()
    m2 = np.zeros((d, d))
    count = 1

    samples = np.empty((iterations, d))
    lps = np.empty(iterations)
    accepted = 0

    for it in range(iterations):
        y1 = x + chol @ rng.standard_normal(d)
        lp1 = float(log_post(y1))
        log_a1 = min(0.0, lp1 - lp)
        u = rng.random()
        if np.isfinite(lp1) and math.log(u) < log_a1:
            x, lp = y1, lp1
            accepted += 1
        else:
            # second stage: shrunk proposal, DR acceptance ratio
            y2 = x + dr_scale * (chol @ rng.standard_normal(d))
            lp2 = float(log_post(y2))
            if np.isfinite(lp2):
                z_num = solve_triangular(chol, y1 - y2, lower=True)
                z_den = solve_triangular(chol, y1 - x, lower=True)
                lq = -0.5 * (z_num @ z_num) + 0.5 * (z_den @ z_den)
                log_a1_rev = min(0.0, lp1 - lp2) if np.isfinite(lp1) else -np.inf
                # log(1 - a) terms; a < 1 strictly on both sides here
                log_num = lp2 + lq + math.log1p(-math.exp(log_a1_rev)) \
                    if log_a1_rev < 0.0 else -np.inf
                log_den = lp + math.log1p(-math.exp(log_a1)) \
                    if log_a1 < 0.0 else -np.inf
                if log_num - log_den >= math.log(rng.random()):
                    x, lp = y2, lp2
                    accepted += 1

        samples[it] = x
        lps[it] = lp

        count += 1
        delta = x - mean
        mean += delta / count
        m2 += np.outer(delta, x - mean)
        if it >= adapt_start and it % adapt_interval == 0:
            cov = sd * (m2 / (count - 1) + cov_eps * np.eye(d))
            try:
                chol = np.linalg.cholesky(cov)
            except np.linalg.LinAlgError:
                pass  # keep previous factor until covariance is usable

    return samples, lps, accepted / iterations


def dram_sample(
    problem: EstimationProblem,
    init: Estimate,
    iterations: int,
    seed: int,
    sigma_obs: float | None = None,
    prior_sd: float = DEFAULT_PRIOR_SD,
) -> Chain:
    """Posterior chain around a DE estimate.

    Likelihood: exp(-loss(theta)^2 / (2 sigma_obs^2)) with sigma_obs
    defaulting to the RMS residual of the init fit (data-driven scale).
    Prior: independent normals centered on init with sd prior_sd,
    truncated to the parameter bounds.  Burn-in is half the chain.
    """
    lower, upper = problem.bounds
    theta0 = np.asarray(init.theta, dtype=float)
    if np.any(theta0 < lower) or np.any(theta0 > upper):
        raise ConfigError("initial estimate outside parameter bounds")
    if sigma_obs is None:
        sigma_obs = max(rms_residual(theta0, problem), 1e-9)

    inv_two_sigma2 = 1.0 / (2.0 * sigma_obs**2)
    inv_two_prior2 = 1.0 / (2.0 * prior_sd**2)

    def log_post(theta: np.ndarray) -> float:
        if np.any(theta < lower) or np.any(theta > upper):
            return -np.inf
        value = loss(theta, problem)
        if not np.isfinite(value):
            return -np.inf
        prior = ((theta - theta0) ** 2).sum() * inv_two_prior2
        return -(value**2) * inv_two_sigma2 - prior

    cov0 = np.eye(theta0.size) * (0.2 * prior_sd) ** 2
    samples, lps, acc = dram(log_post, theta0, iterations, seed, cov0=cov0)
    return Chain(
        samples=samples,
        log_posterior=lps,
        acceptance_rate=acc,
        burn_in=iterations // 2,
        names=tuple(p.name for p in problem.theta_spec),
    )


def chain_diagnostics(chain: Chain) -> ChainDiagnostics:
    """Posterior means, 95% credible intervals, and parameter correlations."""
    post = chain.posterior
    if post.shape[0] == 0:
        raise ConfigError("chain has no post-burn-in samples")
    means = post.mean(axis=0)
    ci_lower = np.percentile(post, 2.5, axis=0)
    ci_upper = np.percentile(post, 97.5, axis=0)
    flat = np.ptp(post, axis=0) == 0.0
    d = post.shape[1]
    corr = np.zeros((d, d))
    ok = ~flat
    if ok.any():
        sub = np.corrcoef(post[:, ok], rowvar=False)
        corr[np.ix_(ok, ok)] = np.atleast_2d(sub)
    np.fill_diagonal(corr, 1.0)
    names = chain.names if chain.names else tuple(f"p{j}" for j in range(d))
    return ChainDiagnostics(
        names=names,
        means=means,
        ci_lower=ci_lower,
        ci_upper=ci_upper,
        correlation=corr,
        zero_variance=tuple(n for n, bad in zip(names, flat) if bad),
    )


def mcse_batch_means(draws: np.ndarray, n_batches: int = 50) -> np.ndarray:
    """Monte-Carlo standard error of the mean via non-overlapping batch means."""
    draws = np.atleast_2d(draws.T).T
    n = draws.shape[0]
    size = n // n_batches
    if size < 2:
        raise ConfigError("chain too short for batch means")
    trimmed = draws[: size * n_batches]
    batches = trimmed.reshape(n_batches, size, -1).mean(axis=1)
    return batches.std(axis=0, ddof=1) / math.sqrt(n_batches)
