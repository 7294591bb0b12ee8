import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from decaychaos import analysis
from decaychaos.analysis import (CorrelationCurve, Verdict, correlation_dimension,
                                 correlation_integral, default_radii, eligible_pairs,
                                 estimate_dimension, false_nearest_neighbors,
                                 permutation_surrogates, rank_p_value, scaling_region,
                                 surrogate_test)
from decaychaos.errors import (DegenerateSeries, EmptyScalingRegion, InvalidConfig,
                               SeriesTooShort, SurrogateDegenerate, TooFewPoints)
from decaychaos.generators import (DistributionConfig, LogisticConfig, logistic_orbit,
                                   uniform_intervals)
from decaychaos.series import EmbeddingSpec, IntervalSeries, PointCloud, embed


@pytest.fixture(scope="module")
def logistic():
    return logistic_orbit(LogisticConfig(4.0, 0.2, 4000, 1000))


@pytest.fixture(scope="module")
def noise():
    return uniform_intervals(DistributionConfig.uniform(0.0, 1.0, 4000), seed=0)


def test_three_point_example():
    curve = correlation_integral(PointCloud([[0.0], [1.0], [2.0]]), [1.5])
    assert curve.c_values.tolist() == [2.0 / 3.0]
    assert curve.pair_counts.tolist() == [2] and curve.n_pairs == 3


def test_extremes_of_radius():
    rng = np.random.default_rng(1)
    pts = rng.random((50, 3))
    d = np.abs(pts[:, None, :] - pts[None, :, :]).max(axis=2)
    off = d[np.triu_indices(50, 1)]
    curve = correlation_integral(PointCloud(pts), [off.min() / 2, off.max(), off.max() * 2])
    assert curve.c_values.tolist() == [0.0, 1.0, 1.0]


def test_too_few_points():
    with pytest.raises(TooFewPoints):
        correlation_integral(PointCloud([[1.0]]), [1.0])
    with pytest.raises(TooFewPoints):
        correlation_integral(PointCloud([[1.0], [2.0], [3.0]]), [1.0], theiler=2)


@pytest.mark.parametrize("radii", [[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [np.inf]])
def test_bad_radii(radii):
    with pytest.raises(InvalidConfig):
        correlation_integral(PointCloud([[0.0], [1.0]]), radii)


def test_eligible_pairs():
    assert eligible_pairs(3, 0) == 3
    assert eligible_pairs(10, 1) == 36
    assert eligible_pairs(4, 3) == 0


@settings(max_examples=50)
@given(arrays(np.float64, st.tuples(st.integers(2, 80), st.integers(1, 4)),
              elements=st.floats(-100, 100)),
       st.integers(0, 2))
def test_curve_monotone_and_bounded(pts, w):
    if eligible_pairs(len(pts), w) == 0:
        return
    radii = np.geomspace(1e-3, 500.0, 30)
    c = correlation_integral(PointCloud(pts), radii, theiler=w).c_values
    assert np.all(np.diff(c) >= 0.0)
    assert c.min() >= 0.0 and c.max() <= 1.0
    assert c[-1] == 1.0


def test_exact_power_law_recovered():
    r = np.geomspace(0.1, 1.0, 20)
    est = estimate_dimension(CorrelationCurve(r, r ** 2), fit_range=(0.1, 1.0))
    assert est.d2 == pytest.approx(2.0, abs=1e-12)
    assert est.fit_residual < 1e-12
    assert est.fit_range == (r[0], r[-1])


def test_auto_window_picks_longest_straight_run():
    r = np.geomspace(1e-3, 1.0, 30)
    # slope 1 below r = 0.05, then slope 3 on a shorter stretch
    knee = 0.05
    c = np.where(r < knee, r / knee * 1e-2, 1e-2 * (r / knee) ** 3)
    c = np.minimum(c, 1.0)
    a, b = scaling_region(CorrelationCurve(r, c))
    assert r[b] < knee
    est = estimate_dimension(CorrelationCurve(r, c))
    assert est.d2 == pytest.approx(1.0, abs=1e-9)


def test_empty_scaling_region():
    r = np.geomspace(0.1, 1.0, 10)
    with pytest.raises(EmptyScalingRegion):
        estimate_dimension(CorrelationCurve(r, np.zeros(10)), fit_range=(0.1, 1.0))
    with pytest.raises(EmptyScalingRegion):
        estimate_dimension(CorrelationCurve(r, r ** 2), fit_range=(2.0, 3.0))
    with pytest.raises(EmptyScalingRegion):
        estimate_dimension(CorrelationCurve(r, np.zeros(10)))


def test_curve_validation():
    with pytest.raises(InvalidConfig):
        CorrelationCurve([0.1, 0.2], [0.5, 0.4])
    with pytest.raises(InvalidConfig):
        CorrelationCurve([0.1, 0.2], [0.5, 1.5])
    with pytest.raises(InvalidConfig):
        CorrelationCurve([0.1], [0.5, 0.6])


@pytest.mark.parametrize("c", [0.125, 4.0, 3.0])
def test_scale_equivariance(logistic, c):
    noise = uniform_intervals(DistributionConfig.uniform(0.5, 1.5, 1500), seed=2)
    cloud = embed(noise)
    scaled = embed(noise.scaled(c))
    radii = default_radii(cloud, 1, seed=3)
    base = correlation_integral(cloud, radii, theiler=1)
    other = correlation_integral(scaled, radii * c, theiler=1)
    if c in (0.125, 4.0):
        # powers of two scale every double exactly
        assert np.array_equal(base.pair_counts, other.pair_counts)
    else:
        assert np.abs(base.pair_counts - other.pair_counts).max() <= 2
    lo, hi = estimate_dimension(base).fit_range
    a = estimate_dimension(base, (lo, hi)).d2
    b = estimate_dimension(other, (lo * c, hi * c)).d2
    assert b == pytest.approx(a, abs=1e-9 if c != 3.0 else 1e-3)


def test_sampled_mode_tracks_exact(noise):
    cloud = embed(noise)
    radii = default_radii(cloud, 1, seed=0)
    exact = correlation_integral(cloud, radii, theiler=1)
    samp = correlation_integral(cloud, radii, theiler=1, seed=5, exact_ceiling=1000,
                                sampled_pairs=2_000_000)
    assert samp.sampled and not exact.sampled
    assert samp.n_pairs > 1_900_000
    top = exact.c_values > 0.01
    assert np.allclose(samp.c_values[top], exact.c_values[top], rtol=0.05)
    again = correlation_integral(cloud, radii, theiler=1, seed=5, exact_ceiling=1000,
                                 sampled_pairs=2_000_000)
    assert np.array_equal(again.pair_counts, samp.pair_counts)


def test_default_radii_shape(noise):
    r = default_radii(embed(noise), 1, seed=0)
    assert r.size == analysis.N_RADII
    assert np.all(np.diff(r) > 0) and r[0] > 0
    with pytest.raises(DegenerateSeries):
        default_radii(PointCloud(np.ones((10, 2))), 0)


def test_dimension_bounded_by_embedding(noise):
    for m in (1, 2, 3):
        est, _ = correlation_dimension(noise, EmbeddingSpec(m, 1))
        assert 0.0 <= est.d2 <= m + 0.5
        assert est.fit_range[0] < est.fit_range[1]


def test_logistic_lower_than_noise(logistic, noise):
    d_log, _ = correlation_dimension(logistic)
    d_noise, _ = correlation_dimension(noise)
    assert 0.85 <= d_log.d2 <= 1.15
    assert d_noise.d2 > 2.5


def test_fnn_logistic_and_noise(logistic, noise):
    log_fnn = dict(false_nearest_neighbors(logistic, 6, 1))
    noise_fnn = dict(false_nearest_neighbors(noise, 6, 1))
    assert all(log_fnn[m] < 0.05 for m in range(2, 7))
    # uniform noise settles near 0.18 for m >= 4 under the combined criterion
    assert all(noise_fnn[m] > 0.15 for m in range(1, 7))
    assert all(0.0 <= f <= 1.0 for f in noise_fnn.values())


def test_fnn_errors():
    with pytest.raises(DegenerateSeries):
        false_nearest_neighbors(IntervalSeries(np.full(100, 0.5)), 3)
    with pytest.raises(SeriesTooShort):
        false_nearest_neighbors(IntervalSeries(np.arange(1.0, 6.0)), 6)


def test_rank_p_value():
    assert rank_p_value(1.0, np.arange(2.0, 21.0)) == 0.05
    assert rank_p_value(100.0, np.arange(19.0)) == 1.0
    assert rank_p_value(5.0, [5.0] * 19) == 1.0


@given(st.floats(0, 10), arrays(np.float64, st.integers(19, 60), elements=st.floats(0, 10)))
def test_p_value_on_rank_grid(obs, surr):
    p = rank_p_value(obs, surr)
    k = p * (surr.size + 1)
    assert abs(k - round(k)) < 1e-9 and 1 <= round(k) <= surr.size + 1


@given(arrays(np.float64, st.integers(2, 200), elements=st.floats(0.001, 1e6)),
       st.integers(0, 2 ** 32))
def test_surrogates_preserve_multiset(values, seed):
    for s in permutation_surrogates(IntervalSeries(values), 3, seed):
        assert np.array_equal(np.sort(s), np.sort(values))


def test_surrogates_actually_reorder(noise):
    s = permutation_surrogates(noise, 2, seed=1)
    assert not np.array_equal(s[0], noise.values)
    assert not np.array_equal(s[0], s[1])


def test_surrogate_test_logistic(logistic):
    rep = surrogate_test(logistic, EmbeddingSpec(3, 1), 19, 0.05, seed=1)
    assert rep.verdict is Verdict.STRUCTURE
    assert rep.p_value == 0.05 and rep.n_surrogates == 19
    assert rep.observed_stat < min(rep.surrogate_stats)


def test_surrogate_report_invariants(noise):
    rep = surrogate_test(noise, EmbeddingSpec(3, 1), 19, 0.05, seed=1000)
    assert rep.verdict is Verdict.NO_STRUCTURE
    assert (rep.p_value <= rep.alpha) == (rep.verdict is Verdict.STRUCTURE)
    assert rep.p_value == rank_p_value(rep.observed_stat, rep.surrogate_stats)


def test_surrogate_result_independent_of_threads():
    s = uniform_intervals(DistributionConfig.uniform(0.0, 1.0, 600), seed=7)
    one = surrogate_test(s, n_surrogates=19, seed=3, threads=1)
    four = surrogate_test(s, n_surrogates=19, seed=3, threads=4)
    assert one == four


def test_surrogate_preconditions(noise):
    with pytest.raises(InvalidConfig):
        surrogate_test(noise, n_surrogates=10)
    with pytest.raises(InvalidConfig):
        surrogate_test(noise, alpha=1.5)


def test_surrogate_failure_names_index():
    short = logistic_orbit(LogisticConfig(4.0, 0.2, 500, 1000))
    # the map orbit has close pairs at r < 0.01, shuffled copies do not
    with pytest.raises(SurrogateDegenerate) as err:
        surrogate_test(short, EmbeddingSpec(3, 1), 19, fit_range=(1e-4, 1e-2))
    assert err.value.index == 0
    assert isinstance(err.value.cause, EmptyScalingRegion)
