import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epicost.calibration import (
    Chain,
    EstimationProblem,
    chain_diagnostics,
    de_minimize,
    de_optimize,
    dram,
    dram_sample,
    loss,
    loss_batch,
    mcse_batch_means,
    run_restarts,
)
from epicost.errors import ConfigError
from synthutil import TABLE1, TRUE_TAU, TRUE_XI, synthetic_problem


@pytest.fixture(scope="module")
def noiseless():
    return synthetic_problem(n_days=85, mu_free=(0.3, 0.5, 0.65, 0.7, 0.6))


# -------------------------------------------------------------------- loss

def test_loss_zero_at_generating_theta(noiseless):
    problem, theta_true = noiseless
    data_norm = np.linalg.norm(problem.data.cumulative_confirmed)
    assert loss(theta_true, problem) < 1e-6 * data_norm


def test_loss_discriminates_wrong_schedule(noiseless):
    problem, theta_true = noiseless
    saturated = theta_true.copy()
    saturated[2:] = 0.95
    assert loss(saturated, problem) > loss(theta_true, problem)


def test_loss_increases_under_xi_perturbation(noiseless):
    problem, theta_true = noiseless
    bumped = theta_true.copy()
    bumped[0] += 1.0
    assert loss(bumped, problem) > loss(theta_true, problem)


def test_loss_batch_matches_scalar(noiseless):
    problem, theta_true = noiseless
    thetas = np.vstack([theta_true, theta_true * 0.9 + 0.01])
    batch = loss_batch(thetas, problem)
    assert batch[0] == pytest.approx(loss(thetas[0], problem))
    assert batch[1] == pytest.approx(loss(thetas[1], problem))


def test_theta_spec_layout(noiseless):
    problem, theta_true = noiseless
    spec = problem.theta_spec
    assert [p.name for p in spec[:3]] == ["xi", "tau", "mu_2"]
    assert problem.dim == theta_true.size
    assert spec[1].upper == 0.95


# ------------------------------------------------------ differential evolution

def test_de_budget_too_small():
    with pytest.raises(ConfigError, match="budget"):
        de_minimize(lambda X: (X**2).sum(axis=1), np.zeros(3), np.ones(3),
                    budget=50, seed=0)


def test_de_sphere_small():
    x, value, evals = de_minimize(lambda X: (X**2).sum(axis=1),
                                  np.full(5, -10.0), np.full(5, 10.0),
                                  budget=20_000, seed=0)
    assert value < 1e-10
    assert evals <= 20_000


def test_de_deterministic():
    fn = lambda X: ((X - 0.3) ** 2).sum(axis=1)
    a = de_minimize(fn, np.zeros(4), np.ones(4), budget=5_000, seed=9)
    b = de_minimize(fn, np.zeros(4), np.ones(4), budget=5_000, seed=9)
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]


def test_de_candidates_respect_tight_bounds():
    lower = np.array([0.2, -0.05, 1.0])
    upper = np.array([0.21, 0.05, 1.001])
    seen = []

    def fn(X):
        seen.append(X.copy())
        return ((X - lower) ** 2).sum(axis=1)

    de_minimize(fn, lower, upper, budget=3_000, seed=2)
    stacked = np.vstack(seen)
    assert np.all(stacked >= lower - 1e-12)
    assert np.all(stacked <= upper + 1e-12)


def test_de_incumbent_monotone():
    history = []

    def fn(X):
        vals = ((X - 0.5) ** 2).sum(axis=1)
        history.append(vals.min())
        return vals

    de_minimize(fn, np.zeros(6), np.ones(6), budget=4_000, seed=3)
    best_so_far = np.minimum.accumulate(history)
    # best-so-far can only improve between generations
    assert np.all(np.diff(best_so_far) <= 0)


def test_restarts_degenerate_equals_single(noiseless):
    problem, _ = noiseless
    ests, best = run_restarts(problem, restarts=1, budget_each=2_000, seed=4)
    single = de_optimize(problem, budget=2_000, seed=4)
    assert np.array_equal(best.theta, single.theta)
    assert best.loss_value == single.loss_value


def test_restarts_best_is_argmin(noiseless):
    problem, _ = noiseless
    ests, best = run_restarts(problem, restarts=4, budget_each=2_000, seed=1)
    assert best.loss_value <= min(e.loss_value for e in ests)
    assert len(ests) == 4


# ------------------------------------------------------------------- DRAM

def test_dram_gaussian_target_moments():
    mean_true = np.array([1.5, -2.0])
    cov_true = np.array([[1.0, 0.6], [0.6, 1.5]])
    prec = np.linalg.inv(cov_true)

    def lp(x):
        d = x - mean_true
        return -0.5 * d @ prec @ d

    samples, _, acc = dram(lp, np.zeros(2), iterations=60_000, seed=3)
    post = samples[30_000:]
    se = mcse_batch_means(post)
    assert np.all(np.abs(post.mean(axis=0) - mean_true) <= 3 * se)
    cov = np.cov(post.T)
    scale = np.sqrt(np.outer(np.diag(cov_true), np.diag(cov_true)))
    assert np.all(np.abs(cov - cov_true) / scale < 0.15)
    assert 0.05 < acc < 0.9


def test_dram_chain_respects_bounds(noiseless):
    problem, theta_true = noiseless
    est = de_optimize(problem, budget=3_000, seed=0)
    chain = dram_sample(problem, est, iterations=2_000, seed=1)
    lower, upper = problem.bounds
    assert np.all(chain.samples >= lower) and np.all(chain.samples <= upper)
    assert chain.burn_in == 1_000
    assert 0.0 < chain.acceptance_rate < 1.0


def test_dram_rejects_out_of_bounds_init(noiseless):
    problem, theta_true = noiseless
    bad = theta_true.copy()
    bad[0] = -1.0
    from epicost.calibration import Estimate
    with pytest.raises(ConfigError):
        dram_sample(problem, Estimate(theta=bad, loss_value=1.0, evaluations_used=0),
                    iterations=100, seed=0)


def test_dram_acceptance_band_on_synthetic():
    problem, theta_true = synthetic_problem(
        n_days=71, mu_free=(0.3, 0.5, 0.65, 0.7), noise_sd=2.0, seed=77
    )
    ests, best = run_restarts(problem, restarts=4, budget_each=20_000, seed=5)
    chain = dram_sample(problem, best, iterations=20_000, seed=11, sigma_obs=2.0)
    assert 0.1 <= chain.acceptance_rate <= 0.6


def test_dram_stationary_distribution_1d():
    # skewed two-component target; compare histogram to target mass on a grid
    edges = np.linspace(-6.0, 8.0, 57)

    def log_density(x):
        return np.logaddexp(
            -0.5 * x**2,
            np.log(0.5) - 0.5 * ((x - 3.0) / 0.7) ** 2 + np.log(1 / 0.7),
        )

    def lp(vec):
        return float(log_density(vec[0]))

    samples, _, _ = dram(lp, np.array([0.0]), iterations=1_000_000, seed=13)
    draws = samples[200_000:, 0]
    centers = 0.5 * (edges[1:] + edges[:-1])
    target = np.exp(log_density(centers))
    target /= target.sum()
    hist, _ = np.histogram(draws, bins=edges)
    empirical = hist / hist.sum()
    tv = 0.5 * np.abs(empirical - target).sum()
    assert tv < 0.05


# -------------------------------------------------------------- diagnostics

def make_chain(samples):
    n = samples.shape[0]
    return Chain(samples=samples, log_posterior=np.zeros(n),
                 acceptance_rate=0.3, burn_in=0)


def test_diagnostics_perfect_correlation():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(500)
    diag = chain_diagnostics(make_chain(np.column_stack([x, 2 * x + 1])))
    assert diag.correlation[0, 1] == pytest.approx(1.0)


def test_diagnostics_independent_columns():
    rng = np.random.default_rng(1)
    diag = chain_diagnostics(make_chain(rng.standard_normal((100_000, 2))))
    assert abs(diag.correlation[0, 1]) < 0.02


def test_diagnostics_unit_diagonal_and_zero_variance_flag():
    rng = np.random.default_rng(2)
    cols = np.column_stack([rng.standard_normal(300), np.full(300, 0.7)])
    diag = chain_diagnostics(make_chain(cols))
    assert np.all(np.diag(diag.correlation) == 1.0)
    assert diag.correlation[0, 1] == 0.0
    assert diag.zero_variance == ("p1",)
    assert diag.ci_lower[0] <= diag.means[0] <= diag.ci_upper[0]


def test_mcse_batch_means_scale():
    rng = np.random.default_rng(3)
    draws = rng.standard_normal(100_000)
    se = mcse_batch_means(draws)
    assert se[0] == pytest.approx(1.0 / np.sqrt(100_000), rel=0.35)
