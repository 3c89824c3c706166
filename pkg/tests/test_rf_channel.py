import numpy as np
import pytest
from scipy import stats

from vlcomp.rf_channel import sample_rf_gain


def test_deterministic_per_seed():
    a = sample_rf_gain(2.0, 1.0, 2.0, seed=11)
    b = sample_rf_gain(2.0, 1.0, 2.0, seed=11)
    c = sample_rf_gain(2.0, 1.0, 2.0, seed=12)
    assert a == b and a != c


def test_mean_power_follows_pathloss():
    # E|g|^2 = d^(-mu) = 0.25 at d=2, mu=2
    draws = sample_rf_gain(2.0, 1.0, 2.0, seed=0, size=1_000_000)
    assert abs(draws.mean() - 0.25) < 0.002


def test_no_pathloss_when_exponent_zero():
    draws = sample_rf_gain(5.0, 1.0, 0.0, seed=1, size=200_000)
    assert draws.mean() == pytest.approx(1.0, abs=0.01)


def test_rayleigh_special_case_is_exponential():
    # F=1 reduces Nakagami amplitude to Rayleigh, so |g|^2 is exponential
    draws = sample_rf_gain(2.0, 1.0, 2.0, seed=2, size=100_000)
    _, p = stats.kstest(draws, "expon", args=(0.0, 0.25))
    assert p > 0.01


def test_moments_within_three_standard_errors():
    d, f, mu, n = 1.7, 2.5, 2.0, 1_000_000
    omega = d ** (-mu)
    draws = sample_rf_gain(d, f, mu, seed=3, size=n)
    se_mean = draws.std(ddof=1) / np.sqrt(n)
    assert abs(draws.mean() - omega) < 3 * se_mean
    var = draws.var(ddof=1)
    m4 = np.mean((draws - draws.mean()) ** 4)
    se_var = np.sqrt(max(m4 - var ** 2, 0.0) / n)
    assert abs(var - omega ** 2 / f) < 3 * se_var


def test_domain_errors():
    with pytest.raises(ValueError):
        sample_rf_gain(0.0, 1.0, 2.0, seed=0)
    with pytest.raises(ValueError):
        sample_rf_gain(1.0, 0.2, 2.0, seed=0)
