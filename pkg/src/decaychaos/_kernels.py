"""Hot loops, each in a numba and a pure-numpy flavour.

The public names at the bottom dispatch on :data:`decaychaos._accel.USE_NUMBA`.
Both flavours must agree bit-for-bit: pair counts are integers, nearest
neighbour searches break ties on the lowest index, and every floating point
operation is performed in the same order.
"""
import numpy as np

from . import _accel
from ._accel import njit

# rows per block in the numpy pair kernels; bounds memory to ~block * M doubles
_BLOCK = 256


@njit
def _logistic_nb(k, x0, n, burn_in):
    x = x0
    for _ in range(burn_in):
        x = k * x * (1.0 - x)
    out = np.empty(n)
    for i in range(n):
        x = k * x * (1.0 - x)
        out[i] = x
    return out


def _logistic_np(k, x0, n, burn_in):
    x = x0
    for _ in range(burn_in):
        x = k * x * (1.0 - x)
    out = np.empty(n)
    for i in range(n):
        x = k * x * (1.0 - x)
        out[i] = x
    return out


@njit
def _pair_counts_nb(coords, radii, theiler):
    # coords is (m, M), C-contiguous; returns counts[k] = #{d <= radii[k]}
    m, M = coords.shape
    K = radii.size
    hist = np.zeros(K + 1, np.int64)
    dist = np.empty(M)
    for i in range(M):
        start = i + theiler + 1
        if start >= M:
            break
        xi = coords[0, i]
        for j in range(start, M):
            dist[j] = abs(xi - coords[0, j])
        for c in range(1, m):
            xi = coords[c, i]
            for j in range(start, M):
                v = abs(xi - coords[c, j])
                if v > dist[j]:
                    dist[j] = v
        for j in range(start, M):
            d = dist[j]
            b = 0
            for q in range(K):
                b += radii[q] < d
            hist[b] += 1
    return np.cumsum(hist)[:K]


def _pair_counts_np(coords, radii, theiler):
    m, M = coords.shape
    K = radii.size
    hist = np.zeros(K + 1, np.int64)
    cols = np.arange(M)
    for lo in range(0, M, _BLOCK):
        hi = min(lo + _BLOCK, M)
        first = lo + theiler + 1
        if first >= M:
            break
        sub = slice(first, M)
        d = np.abs(coords[0, lo:hi, None] - coords[0, None, sub])
        for c in range(1, m):
            np.maximum(d, np.abs(coords[c, lo:hi, None] - coords[c, None, sub]), out=d)
        keep = cols[None, sub] > (np.arange(lo, hi)[:, None] + theiler)
        bins = np.searchsorted(radii, d[keep], side="left")
        hist += np.bincount(bins, minlength=K + 1)
    return np.cumsum(hist)[:K]


def distance_counts(distances, radii):
    """Cumulative counts of ``distances <= r`` for each radius (numpy on both paths)."""
    bins = np.searchsorted(radii, distances, side="left")
    return np.cumsum(np.bincount(bins, minlength=radii.size + 1))[:radii.size]


@njit
def _nearest_nb(coords, theiler):
    m, M = coords.shape
    best = np.full(M, np.inf)
    arg = np.full(M, -1, np.int64)
    for i in range(M):
        for j in range(M):
            if abs(i - j) <= theiler:
                continue
            d = 0.0
            for c in range(m):
                v = abs(coords[c, i] - coords[c, j])
                if v > d:
                    d = v
            if d < best[i]:
                best[i] = d
                arg[i] = j
    return best, arg


def _nearest_np(coords, theiler):
    m, M = coords.shape
    best = np.full(M, np.inf)
    arg = np.full(M, -1, np.int64)
    cols = np.arange(M)
    for lo in range(0, M, _BLOCK):
        hi = min(lo + _BLOCK, M)
        d = np.abs(coords[0, lo:hi, None] - coords[0, None, :])
        for c in range(1, m):
            np.maximum(d, np.abs(coords[c, lo:hi, None] - coords[c, None, :]), out=d)
        rows = np.arange(lo, hi)[:, None]
        d[np.abs(cols[None, :] - rows) <= theiler] = np.inf
        a = np.argmin(d, axis=1)
        b = d[np.arange(hi - lo), a]
        ok = np.isfinite(b)
        best[lo:hi][ok] = b[ok]
        arg[lo:hi][ok] = a[ok]
    return best, arg


@njit
def _dead_time_nb(times, tau):
    n = times.size
    keep = np.zeros(n, np.bool_)
    if n == 0:
        return keep
    keep[0] = True
    last = times[0]
    for i in range(1, n):
        if times[i] - last >= tau:
            keep[i] = True
            last = times[i]
    return keep


def _dead_time_np(times, tau):
    n = times.size
    keep = np.zeros(n, bool)
    if n == 0:
        return keep
    keep[0] = True
    last = times[0]
    for i in range(1, n):
        if times[i] - last >= tau:
            keep[i] = True
            last = times[i]
    return keep


@njit
def _shuffle_nb(values, u):
    out = values.copy()
    n = out.size
    for step in range(n - 1):
        i = n - 1 - step
        j = int(u[step] * (i + 1))
        if j > i:
            j = i
        tmp = out[i]
        out[i] = out[j]
        out[j] = tmp
    return out


def _shuffle_np(values, u):
    out = values.copy()
    n = out.size
    for step in range(n - 1):
        i = n - 1 - step
        j = min(int(u[step] * (i + 1)), i)
        out[i], out[j] = out[j], out[i]
    return out


KERNELS = {
    "logistic_iterate": (_logistic_nb, _logistic_np),
    "pair_counts": (_pair_counts_nb, _pair_counts_np),
    "nearest_neighbors": (_nearest_nb, _nearest_np),
    "dead_time_mask": (_dead_time_nb, _dead_time_np),
    "shuffle": (_shuffle_nb, _shuffle_np),
}


def _pick(name):
    nb, np_ = KERNELS[name]
    return nb if _accel.USE_NUMBA else np_


logistic_iterate = _pick("logistic_iterate")
_pair_counts = _pick("pair_counts")
_nearest = _pick("nearest_neighbors")
dead_time_mask = _pick("dead_time_mask")
_shuffle = _pick("shuffle")


def pair_counts(points, radii, theiler=0):
    """Exact cumulative pair counts for an ``(M, m)`` array (pairs ``j > i + theiler``)."""
    coords = np.ascontiguousarray(np.asarray(points, dtype=np.float64).T)
    return _pair_counts(coords, np.ascontiguousarray(radii, dtype=np.float64), int(theiler))


def nearest_neighbors(points, theiler=0):
    """Max-norm nearest neighbour of each point outside ``|i - j| <= theiler``."""
    coords = np.ascontiguousarray(np.asarray(points, dtype=np.float64).T)
    return _nearest(coords, int(theiler))


def shuffle(values, u):
    """Fisher-Yates shuffle driven by ``len(values) - 1`` uniforms in [0, 1)."""
    return _shuffle(np.ascontiguousarray(values), np.ascontiguousarray(u, dtype=np.float64))
