"""Numba versus pure-numpy kernels.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Both flavours are called directly from ``decaychaos._kernels.KERNELS``, so the
environment switch is irrelevant here. Each row checks that the two results
are identical before reporting the median wall time of ``--repeat`` calls.
"""
import argparse
import statistics
import time

import numpy as np

from decaychaos import _accel
from decaychaos._kernels import KERNELS


def _cases(quick):
    rng = np.random.default_rng(0)
    sizes = (500, 2000) if quick else (500, 2000, 8000)
    for M in sizes:
        coords = np.ascontiguousarray(rng.random((3, M)))
        radii = np.geomspace(1e-3, 1.0, 40)
        yield "pair_counts", f"M={M}, m=3, 40 radii", (coords, radii, 1)
    for M in sizes[:2]:
        coords = np.ascontiguousarray(rng.random((3, M)))
        yield "nearest_neighbors", f"M={M}, m=3", (coords, 1)
    n = 10 ** 5 if quick else 10 ** 6
    yield "logistic_iterate", f"n={n}", (4.0, 0.2, n, 1000)
    times = np.cumsum(rng.exponential(1.0, n))
    yield "dead_time_mask", f"n={n}", (times, 0.5)
    values = rng.random(n)
    yield "shuffle", f"n={n}", (values, rng.random(n - 1))


def _time(fn, args, repeat):
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        res = fn(*args)
        out.append(time.perf_counter() - t)
    return statistics.median(out), res


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    if not _accel.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<18} {'case':<24} {'numba s':>10} {'numpy s':>10} {'speedup':>8}  same")
    for name, label, kargs in _cases(args.quick):
        nb, np_ = KERNELS[name]
        nb(*kargs)  # compile (or load from cache) outside the timing
        t_nb, r_nb = _time(nb, kargs, args.repeat)
        t_np, r_np = _time(np_, kargs, args.repeat)
        print(f"{name:<18} {label:<24} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x  "
              f"{'yes' if _same(r_nb, r_np) else 'NO'}")


if __name__ == "__main__":
    main()
