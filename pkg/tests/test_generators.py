import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from decaychaos import generators
from decaychaos.errors import InvalidConfig, RejectionOverflow
from decaychaos.generators import (DecayConfig, DistributionConfig, LogisticConfig,
                                   distribution_intervals, exponential_from_uniform,
                                   exponential_intervals, gaussian_intervals,
                                   logistic_orbit, lognormal_intervals, uniform_intervals)

KS_SEEDS = range(20)
# seeds whose 10^4-sample KS test rejects at 1%, recorded from the oracle run
# (seed 1 shares one unlucky uniform stream across generators)
KS_REJECTED = {"exponential": [1], "uniform": [1], "gaussian": [], "lognormal": []}


def test_logistic_examples():
    x = logistic_orbit(LogisticConfig(4.0, 0.2, 3, 0)).values
    # decimal values up to rounding; the float recurrence itself is exact
    assert x.tolist() == pytest.approx([0.64, 0.9216, 0.28901376], rel=1e-14)
    y, want = 0.2, []
    for _ in range(3):
        y = 4.0 * y * (1.0 - y)
        want.append(y)
    assert x.tolist() == want
    assert logistic_orbit(LogisticConfig(4.0, 0.75, 3, 0)).values.tolist() == [0.75, 0.75, 0.75]
    assert logistic_orbit(LogisticConfig(4.0, 0.5, 3, 0)).values.tolist() == [1.0, 0.0, 0.0]


def test_logistic_recurrence_is_exact():
    x = logistic_orbit(LogisticConfig(3.9, 0.123, 500, 50)).values
    assert np.array_equal(x[1:], 3.9 * x[:-1] * (1.0 - x[:-1]))


def test_logistic_burn_in_shifts_orbit():
    full = logistic_orbit(LogisticConfig(4.0, 0.3, 20, 0)).values
    late = logistic_orbit(LogisticConfig(4.0, 0.3, 10, 10)).values
    assert np.array_equal(full[10:], late)


@settings(max_examples=15)
@given(st.floats(0.0, 4.0), st.floats(0.0, 1.0))
def test_logistic_orbit_confined(k, x0):
    x = logistic_orbit(LogisticConfig(k, x0, 10 ** 6, 0)).values
    assert x.min() >= 0.0 and x.max() <= 1.0


@pytest.mark.parametrize("k, x0", [(4.1, 0.2), (-0.1, 0.2), (4.0, 1.2), (4.0, -0.1), (np.nan, 0.2)])
def test_logistic_config_rejects(k, x0):
    with pytest.raises(InvalidConfig):
        LogisticConfig(k, x0, 10, 0)


def test_exponential_inverse_cdf():
    assert exponential_from_uniform(np.exp(-1.0), 1.0) == pytest.approx(1.0, abs=1e-15)
    assert exponential_from_uniform(1.0, 3.0) == 0.0


def test_exponential_mean():
    # sd of the mean is 0.5 / sqrt(1e5) = 0.0016, so 1% (0.005) is > 3 sd
    x = exponential_intervals(DecayConfig(2.0, 10 ** 5), seed=0).values
    assert abs(x.mean() - 0.5) < 0.005


def test_uniform_mean_and_support():
    x = uniform_intervals(DistributionConfig.uniform(0.0, 1.0, 10 ** 5), seed=0).values
    assert abs(x.mean() - 0.5) < 0.005
    assert x.min() > 0.0 and x.max() < 1.0


@pytest.mark.parametrize("make", [
    lambda s: exponential_intervals(DecayConfig(2.0, 500), s),
    lambda s: uniform_intervals(DistributionConfig.uniform(0.1, 2.0, 500), s),
    lambda s: gaussian_intervals(DistributionConfig.gaussian(1.0, 0.2, 500), s),
    lambda s: lognormal_intervals(DistributionConfig.lognormal(0.0, 0.5, 500), s),
])
def test_seed_determinism(make):
    assert np.array_equal(make(42).values, make(42).values)
    assert not np.array_equal(make(42).values, make(43).values)


def _ks_rejections(sample, cdf):
    return [s for s in KS_SEEDS if stats.kstest(sample(s), cdf).pvalue < 0.01]


def test_exponential_ks_over_seeds():
    got = _ks_rejections(lambda s: exponential_intervals(DecayConfig(2.0, 10 ** 4), s).values,
                         stats.expon(scale=0.5).cdf)
    assert got == KS_REJECTED["exponential"]


@pytest.mark.parametrize("kind, cfg, dist", [
    ("uniform", DistributionConfig.uniform(0.0, 1.0, 10 ** 4), stats.uniform(0.0, 1.0)),
    ("gaussian", DistributionConfig.gaussian(1.0, 0.2, 10 ** 4),
     stats.truncnorm(-5.0, np.inf, loc=1.0, scale=0.2)),
    ("lognormal", DistributionConfig.lognormal(0.0, 0.5, 10 ** 4), stats.lognorm(0.5)),
])
def test_distribution_ks_over_seeds(kind, cfg, dist):
    assert _ks_rejections(lambda s: distribution_intervals(cfg, s).values, dist.cdf) == KS_REJECTED[kind]


def test_gaussian_rejection_keeps_positive_draws():
    x = gaussian_intervals(DistributionConfig.gaussian(0.5, 1.0, 2000), seed=3).values
    assert x.min() > 0.0
    # truncated normal mean for N(0.5, 1) | > 0
    want = stats.truncnorm(-0.5, np.inf, loc=0.5, scale=1.0).mean()
    assert abs(x.mean() - want) < 0.06


def test_gaussian_wide_sigma_still_succeeds():
    # with mean > 0 at least half the mass is positive, so the budget holds
    x = gaussian_intervals(DistributionConfig.gaussian(1.0, 5.0, 1000), seed=0).values
    assert x.min() > 0.0


def test_gaussian_rejection_overflow_surfaces(monkeypatch):
    monkeypatch.setattr(generators, "REJECTION_BUDGET", 1)
    with pytest.raises(RejectionOverflow):
        gaussian_intervals(DistributionConfig.gaussian(0.01, 5.0, 200), seed=0)


def test_lognormal_degenerate_limit():
    x = lognormal_intervals(DistributionConfig.lognormal(0.0, 1e-300, 100), seed=1).values
    assert np.all(x == 1.0)


@pytest.mark.parametrize("kw", [
    dict(kind="gaussian", mean=0.0, spread=1.0),
    dict(kind="gaussian", mean=1.0, spread=0.0),
    dict(kind="uniform", mean=0.1, spread=0.5),
    dict(kind="poisson", mean=1.0, spread=1.0),
    dict(kind="lognormal", mean=0.0, spread=-1.0),
])
def test_distribution_config_rejects(kw):
    with pytest.raises(InvalidConfig):
        DistributionConfig(n=10, **kw)


def test_kind_mismatch():
    with pytest.raises(InvalidConfig):
        gaussian_intervals(DistributionConfig.uniform(0.0, 1.0, 10))


@pytest.mark.parametrize("rate", [0.0, -1.0, np.inf])
def test_decay_config_rejects(rate):
    with pytest.raises(InvalidConfig):
        DecayConfig(rate, 10)


@given(st.integers(0, 2 ** 64 - 1))
def test_generated_series_positive(seed):
    for s in (exponential_intervals(DecayConfig(1.0, 200), seed),
              uniform_intervals(DistributionConfig.uniform(0.0, 1.0, 200), seed),
              gaussian_intervals(DistributionConfig.gaussian(1.0, 0.2, 200), seed),
              lognormal_intervals(DistributionConfig.lognormal(0.0, 0.5, 200), seed)):
        assert s.values.min() > 0.0
