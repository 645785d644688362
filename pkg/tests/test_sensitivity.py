import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kstest, rankdata

from epicost.errors import ConfigError
from epicost.sensitivity import (
    PARAMETER_ORDER,
    SensitivitySpec,
    default_spec,
    lhs_sample,
    prcc,
    run_sensitivity,
)


def spec_1d(n=10, lo=0.0, hi=1.0):
    return SensitivitySpec(parameter_ranges={"beta": (lo, hi)}, samples=n,
                           eval_times=(14.0,))


def prcc_rank_matrix_oracle(samples: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Partial correlation of ranks via precision-matrix inversion."""
    cols = [rankdata(samples[:, j]) for j in range(samples.shape[1])]
    cols.append(rankdata(y))
    corr = np.corrcoef(np.vstack(cols))
    prec = np.linalg.inv(corr)
    k = samples.shape[1]
    return np.array([
        -prec[j, k] / np.sqrt(prec[j, j] * prec[k, k]) for j in range(samples.shape[1])
    ])


# ----------------------------------------------------------------- LHS

def test_lhs_one_sample_per_stratum():
    s = spec_1d(n=10)
    col = lhs_sample(s, seed=0)[:, 0]
    strata = np.floor(col * 10).astype(int)
    assert sorted(strata) == list(range(10))


def test_lhs_marginals_uniform():
    s = SensitivitySpec(
        parameter_ranges={"beta": (2.0, 4.0), "kappa": (0.1, 0.3)},
        samples=1000, eval_times=(14.0,),
    )
    m = lhs_sample(s, seed=1)
    for j, (lo, hi) in enumerate([(2.0, 4.0), (0.1, 0.3)]):
        unit = (m[:, j] - lo) / (hi - lo)
        assert kstest(unit, "uniform").pvalue > 0.01


def test_lhs_deterministic():
    s = spec_1d(n=50)
    assert np.array_equal(lhs_sample(s, seed=7), lhs_sample(s, seed=7))
    assert not np.array_equal(lhs_sample(s, seed=7), lhs_sample(s, seed=8))


def test_spec_requires_enough_samples():
    with pytest.raises(ConfigError, match="10 samples"):
        SensitivitySpec(parameter_ranges={"beta": (0, 1), "tau": (0, 0.9)},
                        samples=15, eval_times=(14.0,))


# ----------------------------------------------------------------- PRCC

def test_prcc_identity_dependence():
    rng = np.random.default_rng(0)
    x = rng.random((1000, 3))
    y = x[:, 0]
    vals = prcc(x, y)[:, 0]
    assert vals[0] > 0.99
    assert abs(vals[1]) < 0.1 and abs(vals[2]) < 0.1


def test_prcc_null_case():
    rng = np.random.default_rng(1)
    x = rng.random((1000, 3))
    y = rng.random(1000)
    assert np.all(np.abs(prcc(x, y)[:, 0]) < 0.1)


def test_prcc_signed_linear_combination():
    rng = np.random.default_rng(2)
    x = rng.random((1000, 2))
    y = 2 * x[:, 0] - 3 * x[:, 1] + 0.1 * rng.standard_normal(1000)
    vals = prcc(x, y)[:, 0]
    oracle = prcc_rank_matrix_oracle(x, y)
    assert vals[0] > 0 and vals[1] < 0
    assert abs(vals[1]) > abs(vals[0])
    assert vals == pytest.approx(oracle, abs=1e-10)


def test_prcc_matches_matrix_inversion_oracle():
    rng = np.random.default_rng(3)
    x = rng.random((200, 3))
    y = np.sin(3 * x[:, 0]) + x[:, 1] ** 2 + 0.2 * rng.standard_normal(200)
    assert prcc(x, y)[:, 0] == pytest.approx(prcc_rank_matrix_oracle(x, y), abs=1e-10)


def test_prcc_invariant_under_monotone_transform():
    rng = np.random.default_rng(4)
    x = rng.random((300, 3)) + 0.5
    y = x[:, 0] - x[:, 2] + 0.3 * rng.standard_normal(300)
    base = prcc(x, y)
    warped = x.copy()
    warped[:, 0] = np.exp(3 * warped[:, 0])  # strictly increasing
    assert prcc(warped, y) == pytest.approx(base, abs=1e-12)


def test_prcc_sign_flips_with_negated_column():
    rng = np.random.default_rng(5)
    x = rng.random((300, 3))
    y = x[:, 1] + 0.2 * rng.standard_normal(300)
    base = prcc(x, y)
    flipped = x.copy()
    flipped[:, 1] = -flipped[:, 1]
    out = prcc(flipped, y)
    assert out[1, 0] == pytest.approx(-base[1, 0], abs=1e-12)
    assert out[0, 0] == pytest.approx(base[0, 0], abs=1e-12)
    assert out[2, 0] == pytest.approx(base[2, 0], abs=1e-12)


def test_prcc_rejects_constant_column():
    rng = np.random.default_rng(6)
    x = rng.random((100, 2))
    x[:, 1] = 0.4
    with pytest.raises(ConfigError, match="constant"):
        prcc(x, rng.random(100))


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_prcc_bounded(seed):
    rng = np.random.default_rng(seed)
    x = rng.random((60, 3))
    y = rng.random(60)
    assert np.all(np.abs(prcc(x, y)) <= 1.0)


# --------------------------------------------------------- full pipeline

def test_run_sensitivity_excludes_fixed_mu(korea_scenario):
    spec = default_spec(korea_scenario, samples=100, mu_range=(0.3, 0.3),
                        eval_times=(28.0, 112.0))
    result = run_sensitivity(spec, korea_scenario, seed=0)
    assert "mu_const" in result.excluded
    assert "mu_const" not in result.parameters
    assert result.coefficients.shape == (2, 7, 2)
    assert np.all(np.abs(result.coefficients) <= 1.0)


def test_run_sensitivity_deterministic(korea_scenario):
    spec = default_spec(korea_scenario, samples=90, mu_range=(0.3, 0.3),
                        eval_times=(56.0,))
    a = run_sensitivity(spec, korea_scenario, seed=3)
    b = run_sensitivity(spec, korea_scenario, seed=3)
    assert np.array_equal(a.coefficients, b.coefficients)


def test_csv_export(korea_scenario, tmp_path):
    spec = default_spec(korea_scenario, samples=90, mu_range=(0.3, 0.3),
                        eval_times=(56.0,))
    result = run_sensitivity(spec, korea_scenario, seed=3)
    out = tmp_path / "prcc.csv"
    result.to_csv(out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "output,parameter,time,prcc"
    assert len(lines) == 1 + 2 * 7 * 1


def test_run_sensitivity_requires_transmission_rate(korea_scenario):
    spec = SensitivitySpec(parameter_ranges={"kappa": (0.2, 0.3), "xi": (0.1, 0.5)},
                           samples=40, eval_times=(28.0,))
    with pytest.raises(ConfigError, match="transmission rate"):
        run_sensitivity(spec, korea_scenario, seed=0)
