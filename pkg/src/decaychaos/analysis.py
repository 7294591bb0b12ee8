"""Attractor diagnostics: correlation sums, correlation dimension, false
nearest neighbours and the permutation-surrogate test.

Distances are max-norm throughout. Pairs closer in time than a Theiler
window ``w`` (``|i - j| <= w``) are excluded from every pair count.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import enum
import logging

import numpy as np

from . import _kernels
from .errors import (DegenerateSeries, EmptyScalingRegion, InvalidConfig,
                     SeriesTooShort, SurrogateDegenerate, TooFewPoints)
from .rng import SplitMix64
from .series import EmbeddingSpec, IntervalSeries, PointCloud, embed

log = logging.getLogger(__name__)

EXACT_POINT_CEILING = 20_000
SAMPLED_PAIRS = 10 ** 8
N_RADII = 40
RADIUS_QUANTILES = (1e-5, 0.99)
RADIUS_SAMPLE_PAIRS = 10 ** 6
SLOPE_TOLERANCE = 0.10
MIN_FIT_PAIRS = 50
FNN_RATIO = 15.0
FNN_SIZE = 2.0


@dataclass(frozen=True, eq=False)
class CorrelationCurve:
    """Sampled correlation sum ``C(r)`` on a strictly increasing radius grid.

    ``pair_counts`` holds the integer number of pairs within each radius and
    ``n_pairs`` the number of eligible pairs it is normalised by. Curves built
    by hand (for fitting tests) may leave both as ``None``.
    """

    radii: np.ndarray
    c_values: np.ndarray
    n_points: int = 0
    pair_counts: np.ndarray = None
    n_pairs: int = 0
    theiler: int = 0
    sampled: bool = False
    embedding_dimension: int = None
    norm: str = "max"

    def __post_init__(self):
        radii = np.array(self.radii, dtype=np.float64)
        c = np.array(self.c_values, dtype=np.float64)
        if radii.ndim != 1 or radii.size != c.size:
            raise InvalidConfig("radii and c_values must be 1-d and of equal length")
        _check_radii(radii)
        if np.any(c < 0.0) or np.any(c > 1.0):
            raise InvalidConfig("correlation sums must lie in [0, 1]")
        if np.any(np.diff(c) < 0.0):
            raise InvalidConfig("correlation sums must be non-decreasing in r")
        radii.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "c_values", c)
        if self.pair_counts is not None:
            counts = np.array(self.pair_counts, dtype=np.int64)
            counts.setflags(write=False)
            object.__setattr__(self, "pair_counts", counts)


@dataclass(frozen=True)
class DimensionEstimate:
    d2: float
    fit_range: tuple
    fit_residual: float
    n_pairs_in_range: int
    n_radii: int
    intercept: float = 0.0


class Verdict(str, enum.Enum):
    STRUCTURE = "structure_detected"
    NO_STRUCTURE = "no_structure"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SurrogateReport:
    observed_stat: float
    surrogate_stats: tuple
    p_value: float
    verdict: Verdict
    alpha: float
    observed: DimensionEstimate = None

    @property
    def n_surrogates(self):
        return len(self.surrogate_stats)


def _check_radii(radii):
    if radii.size < 1 or not np.all(np.isfinite(radii)) or radii[0] <= 0.0:
        raise InvalidConfig("radii must be finite and > 0")
    if np.any(np.diff(radii) <= 0.0):
        raise InvalidConfig("radii must be strictly increasing")


def _points(cloud):
    return cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)


def eligible_pairs(n_points, theiler=0):
    """Number of index pairs ``i < j`` with ``j - i > theiler``."""
    k = n_points - theiler - 1
    return k * (k + 1) // 2 if k > 0 else 0


def _sample_pair_indices(rng, n_points, theiler, n):
    i = rng.integers(n_points, n)
    j = rng.integers(n_points, n)
    keep = np.abs(i - j) > theiler
    return i[keep], j[keep]


def _pair_distances(points, i, j):
    cols = points.T
    d = np.abs(cols[0][i] - cols[0][j])
    for c in cols[1:]:
        np.maximum(d, np.abs(c[i] - c[j]), out=d)
    return d


def default_radii(cloud, theiler=0, seed=0, n_radii=N_RADII,
                  quantiles=RADIUS_QUANTILES, n_samples=RADIUS_SAMPLE_PAIRS):
    """Log-spaced radii between two quantiles of randomly sampled pair distances.

    Zero distances (repeated points) are dropped before taking quantiles.
    """
    pts = _points(cloud)
    if eligible_pairs(len(pts), theiler) < 1:
        raise TooFewPoints(f"{len(pts)} points leave no pairs outside Theiler window {theiler}")
    i, j = _sample_pair_indices(SplitMix64(seed), len(pts), theiler, n_samples)
    d = _pair_distances(pts, i, j)
    d = d[d > 0.0]
    if d.size < 2:
        raise DegenerateSeries("all sampled pair distances are zero")
    lo, hi = np.quantile(d, quantiles)
    if not hi > lo:
        raise DegenerateSeries("pair distance distribution has no spread")
    return np.geomspace(lo, hi, n_radii)


def correlation_integral(cloud, radii=None, theiler=0, seed=0,
                         exact_ceiling=EXACT_POINT_CEILING, sampled_pairs=SAMPLED_PAIRS):
    """Correlation sum ``C(r)``: the fraction of eligible pairs within max-norm ``r``.

    Clouds up to ``exact_ceiling`` points are counted exactly over every pair
    ``j > i + theiler``; larger clouds use ``sampled_pairs`` random pairs
    drawn from ``seed``.
    """
    pts = _points(cloud)
    total = eligible_pairs(len(pts), theiler)
    if len(pts) < 2 or total < 1:
        raise TooFewPoints(f"{len(pts)} points leave no pairs outside Theiler window {theiler}")
    if radii is None:
        radii = default_radii(pts, theiler, seed)
    radii = np.asarray(radii, dtype=np.float64)
    _check_radii(radii)
    sampled = len(pts) > exact_ceiling
    if sampled:
        rng = SplitMix64(seed)
        counts = np.zeros(radii.size, np.int64)
        used = 0
        chunk = 1_000_000
        while used < sampled_pairs:
            i, j = _sample_pair_indices(rng, len(pts), theiler, min(chunk, sampled_pairs - used))
            counts += _kernels.distance_counts(_pair_distances(pts, i, j), radii)
            used += i.size
            if i.size == 0:
                break
        total = used
    else:
        counts = _kernels.pair_counts(pts, radii, theiler)
    m = pts.shape[1] if pts.ndim == 2 else 1
    return CorrelationCurve(radii, counts / total, len(pts), counts, total, theiler,
                            sampled, m)


def local_slopes(curve):
    """Finite-difference slopes of ``log C`` against ``log r`` between neighbouring radii."""
    with np.errstate(divide="ignore", invalid="ignore"):
        lc = np.log(curve.c_values)
        return np.diff(lc) / np.diff(np.log(curve.radii))


def _usable(curve, min_pairs):
    ok = curve.c_values > 0.0
    if curve.pair_counts is not None:
        ok &= curve.pair_counts >= min_pairs
    return ok


def scaling_region(curve, tolerance=SLOPE_TOLERANCE, min_pairs=MIN_FIT_PAIRS):
    """Index range ``(a, b)`` of the longest radius window whose local slopes
    spread by less than ``tolerance`` times their mean.

    Radii backed by fewer than ``min_pairs`` pairs are not considered. Among
    equally long windows the one with the smallest spread wins.
    """
    ok = _usable(curve, min_pairs)
    slopes = local_slopes(curve)
    best = None
    K = curve.radii.size
    for a in range(K):
        if not ok[a]:
            continue
        hi = lo = slopes[a] if a < K - 1 else None
        for b in range(a + 1, K):
            if not ok[b]:
                break
            s = slopes[b - 1]
            hi, lo = max(hi, s), min(lo, s)
            mean = np.mean(slopes[a:b])
            if mean <= 0.0 or hi - lo >= tolerance * mean:
                break
            if b - a < 2:
                continue
            key = (b - a, -(hi - lo))
            if best is None or key > best[0]:
                best = (key, a, b)
    if best is None:
        raise EmptyScalingRegion("no radius window with a stable log-log slope")
    return best[1], best[2]


def estimate_dimension(curve, fit_range=None, tolerance=SLOPE_TOLERANCE,
                       min_pairs=MIN_FIT_PAIRS):
    """Least-squares slope of ``log C(r)`` against ``log r``.

    With ``fit_range=(r_lo, r_hi)`` every radius inside the closed range with
    ``C > 0`` is used; otherwise the window comes from :func:`scaling_region`.
    ``n_pairs_in_range`` is the pair count at the top of the fit window.
    """
    radii, c = curve.radii, curve.c_values
    if fit_range is None:
        a, b = scaling_region(curve, tolerance, min_pairs)
        sel = np.zeros(radii.size, bool)
        sel[a:b + 1] = True
    else:
        r_lo, r_hi = (float(v) for v in fit_range)
        if not r_lo < r_hi:
            raise InvalidConfig(f"fit range must satisfy r_lo < r_hi, got {fit_range}")
        # relative slack so a range copied from printed radii still selects them
        eps = 1e-12
        sel = (radii >= r_lo * (1 - eps)) & (radii <= r_hi * (1 + eps)) & (c > 0.0)
    if sel.sum() < 3:
        raise EmptyScalingRegion(
            f"only {int(sel.sum())} radii with C(r) > 0 in the fit range, need 3")
    x = np.log(radii[sel])
    y = np.log(c[sel])
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    idx = np.flatnonzero(sel)
    n_pairs = int(curve.pair_counts[idx[-1]]) if curve.pair_counts is not None else 0
    return DimensionEstimate(float(slope), (float(radii[idx[0]]), float(radii[idx[-1]])),
                             residual, n_pairs, int(sel.sum()), float(intercept))


def correlation_dimension(series, spec=None, theiler=None, seed=0, fit_range=None):
    """Embed, count and fit in one call. ``theiler`` defaults to the delay."""
    spec = spec or EmbeddingSpec()
    w = spec.delay if theiler is None else theiler
    cloud = embed(series, spec)
    curve = correlation_integral(cloud, theiler=w, seed=seed)
    return estimate_dimension(curve, fit_range), curve


def false_nearest_neighbors(series, m_max=6, delay=1, theiler=None,
                            ratio_threshold=FNN_RATIO, size_threshold=FNN_SIZE):
    """Fraction of false nearest neighbours for embedding dimensions 1..m_max.

    A neighbour found in ``m`` dimensions is false when adding coordinate
    ``m + 1`` stretches the pair by more than ``ratio_threshold`` times its
    ``m``-dimensional distance, or pushes the pair further apart than
    ``size_threshold`` standard deviations of the series.
    """
    x = series.values if isinstance(series, IntervalSeries) else np.asarray(series, dtype=np.float64)
    w = delay if theiler is None else theiler
    required = m_max * delay + 2 * w + 2
    if m_max < 1:
        raise InvalidConfig("m_max must be >= 1")
    if x.size < required:
        raise SeriesTooShort(required, x.size)
    scale = x.std()
    if scale == 0.0:
        raise DegenerateSeries("constant series: every neighbour distance is zero")
    out = []
    for m in range(1, m_max + 1):
        n = x.size - m * delay
        pts = embed(x[:n + (m - 1) * delay], EmbeddingSpec(m, delay)).points
        dist, nn = _kernels.nearest_neighbors(pts, w)
        found = nn >= 0
        if not np.any(dist[found] > 0.0):
            raise DegenerateSeries(f"all nearest-neighbour distances are zero at m={m}")
        i = np.flatnonzero(found)
        j = nn[found]
        r = dist[found]
        grow = np.abs(x[i + m * delay] - x[j + m * delay])
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio_false = np.where(r > 0.0, grow > ratio_threshold * r, grow > 0.0)
        size_false = np.maximum(r, grow) > size_threshold * scale
        out.append((m, float(np.mean(ratio_false | size_false))))
    return out


def rank_p_value(observed, surrogates):
    """One-sided (low tail) rank p-value: ``(1 + #{s <= observed}) / (S + 1)``."""
    surrogates = np.asarray(surrogates, dtype=np.float64)
    return (1 + int(np.sum(surrogates <= observed))) / (surrogates.size + 1)


def permutation_surrogates(series, n_surrogates, seed=0):
    """Random reorderings of the series; each keeps the exact multiset of values."""
    values = series.values if isinstance(series, IntervalSeries) else np.asarray(series, dtype=np.float64)
    rng = SplitMix64(seed)
    return [_kernels.shuffle(values, rng.random(values.size - 1)) for _ in range(n_surrogates)]


def surrogate_test(series, spec=None, n_surrogates=19, alpha=0.05, seed=0,
                   theiler=None, fit_range=None, threads=1, stat_seed=0):
    """Is the correlation dimension lower than for shuffled copies of the series?

    The statistic is the ``d2`` estimate of :func:`correlation_dimension`
    (same radius-sampling seed ``stat_seed`` for every series). Surrogate
    permutations come from ``seed``; the result does not depend on ``threads``.
    """
    spec = spec or EmbeddingSpec()
    if n_surrogates < 19:
        raise InvalidConfig(f"need at least 19 surrogates, got {n_surrogates}")
    if not 0.0 < alpha < 1.0:
        raise InvalidConfig(f"alpha must be in (0, 1), got {alpha}")
    if not isinstance(series, IntervalSeries):
        series = IntervalSeries(series)
    observed, _ = correlation_dimension(series, spec, theiler, stat_seed, fit_range)
    shuffled = permutation_surrogates(series, n_surrogates, seed)

    def stat(k):
        try:
            est, _ = correlation_dimension(shuffled[k], spec, theiler, stat_seed, fit_range)
        except (EmptyScalingRegion, DegenerateSeries, TooFewPoints) as exc:
            raise SurrogateDegenerate(k, exc) from exc
        return est.d2

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stats = list(pool.map(stat, range(n_surrogates)))
    else:
        stats = [stat(k) for k in range(n_surrogates)]
    p = rank_p_value(observed.d2, stats)
    verdict = Verdict.STRUCTURE if p <= alpha else Verdict.NO_STRUCTURE
    log.info("surrogate test: d2=%.4f surrogates=[%.3f, %.3f] p=%.3f -> %s",
             observed.d2, min(stats), max(stats), p, verdict)
    return SurrogateReport(observed.d2, tuple(stats), p, verdict, alpha, observed)
