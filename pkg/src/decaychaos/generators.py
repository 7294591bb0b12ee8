"""Seeded data sources: logistic-map orbits and i.i.d. interval streams.

All stochastic generators draw from :class:`~decaychaos.rng.SplitMix64` and
are pure functions of ``(config, seed)``.
"""
from dataclasses import dataclass

import numpy as np

from ._kernels import logistic_iterate
from .errors import InvalidConfig, RejectionOverflow
from .rng import SplitMix64
from .series import IntervalSeries

REJECTION_BUDGET = 1000


def _check_count(n, name="n"):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidConfig(f"{name} must be a positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class LogisticConfig:
    k: float = 4.0
    x0: float = 0.2
    n: int = 1000
    burn_in: int = 1000

    def __post_init__(self):
        if not 0.0 <= self.k <= 4.0:
            raise InvalidConfig(f"logistic k must be in [0, 4], got {self.k}")
        if not 0.0 <= self.x0 <= 1.0:
            raise InvalidConfig(f"logistic x0 must be in [0, 1], got {self.x0}")
        _check_count(self.n)
        if int(self.burn_in) != self.burn_in or self.burn_in < 0:
            raise InvalidConfig(f"burn_in must be a non-negative integer, got {self.burn_in!r}")


@dataclass(frozen=True)
class DecayConfig:
    rate: float = 1.0
    n: int = 1000

    def __post_init__(self):
        if not (np.isfinite(self.rate) and self.rate > 0.0):
            raise InvalidConfig(f"decay rate must be > 0, got {self.rate}")
        _check_count(self.n)


@dataclass(frozen=True)
class DistributionConfig:
    """Parameters of an i.i.d. comparison distribution.

    ``uniform``: draws on ``(mean - spread, mean + spread)``.
    ``gaussian``: normal with ``mean`` and standard deviation ``spread``.
    ``lognormal``: ``exp(N(mean, spread))``, i.e. ``mean`` is mu of the log.
    """

    kind: str = "uniform"
    mean: float = 0.5
    spread: float = 0.5
    n: int = 1000

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian", "lognormal"):
            raise InvalidConfig(f"unknown distribution kind {self.kind!r}")
        if not (np.isfinite(self.spread) and self.spread > 0.0):
            raise InvalidConfig(f"spread must be > 0, got {self.spread}")
        if not np.isfinite(self.mean):
            raise InvalidConfig("mean must be finite")
        if self.kind == "gaussian" and self.mean <= 0.0:
            raise InvalidConfig("gaussian intervals need mean > 0")
        if self.kind == "uniform" and self.mean - self.spread < 0.0:
            raise InvalidConfig("uniform intervals need mean - spread >= 0")
        _check_count(self.n)

    @classmethod
    def uniform(cls, low=0.0, high=1.0, n=1000):
        return cls("uniform", (low + high) / 2.0, (high - low) / 2.0, n)

    @classmethod
    def gaussian(cls, mean=1.0, sigma=0.2, n=1000):
        return cls("gaussian", mean, sigma, n)

    @classmethod
    def lognormal(cls, mu=0.0, sigma=0.5, n=1000):
        return cls("lognormal", mu, sigma, n)


def logistic_orbit(cfg):
    """``n`` iterates of ``x -> k x (1 - x)`` after ``burn_in`` discarded steps.

    Recording starts one step after the burn-in, so with ``burn_in=0`` the
    first value is ``k x0 (1 - x0)``.
    """
    values = logistic_iterate(float(cfg.k), float(cfg.x0), int(cfg.n), int(cfg.burn_in))
    return IntervalSeries(values, f"logistic k={cfg.k:g} x0={cfg.x0:g}", dimensionless=True)


def exponential_from_uniform(u, rate):
    """Inverse CDF of Exp(rate); ``u`` must lie in (0, 1]."""
    return -np.log(u) / rate


def exponential_intervals(cfg, seed=0):
    u = SplitMix64(seed).random_oc(cfg.n)
    t = exponential_from_uniform(u, cfg.rate)
    # u == 1 gives exactly zero; such draws are measure-zero but must not
    # break positivity, so they are replaced by the smallest normal double.
    t[t == 0.0] = np.finfo(np.float64).tiny
    return IntervalSeries(t, f"exponential rate={cfg.rate:g} seed={seed}")


def _require(cfg, kind):
    if cfg.kind != kind:
        raise InvalidConfig(f"expected a {kind} config, got {cfg.kind}")


def uniform_intervals(cfg, seed=0):
    _require(cfg, "uniform")
    raw = SplitMix64(seed).raw(cfg.n) >> np.uint64(11)
    # open interval (0, 1): keeps every draw strictly inside (low, high)
    u = (raw.astype(np.float64) + 0.5) * 2.0 ** -53
    low = cfg.mean - cfg.spread
    values = low + (2.0 * cfg.spread) * u
    if values.min() <= 0.0:
        values[values <= 0.0] = np.finfo(np.float64).tiny
    return IntervalSeries(values, f"uniform ({low:g}, {cfg.mean + cfg.spread:g}) seed={seed}")


def gaussian_intervals(cfg, seed=0):
    """Normal draws conditioned on being positive, by rejection.

    Raises :class:`RejectionOverflow` once more than ``1000 n`` draws were
    needed, instead of clamping (a clamp would put an atom at zero).
    """
    _require(cfg, "gaussian")
    rng = SplitMix64(seed)
    budget = REJECTION_BUDGET * cfg.n
    kept = []
    have = 0
    attempts = 0
    while have < cfg.n:
        need = cfg.n - have
        batch = min(max(64, 2 * need), budget - attempts)
        if batch <= 0:
            raise RejectionOverflow(
                f"gaussian mean={cfg.mean} sigma={cfg.spread}: more than {budget} draws "
                f"for {cfg.n} positive values")
        z = cfg.mean + cfg.spread * rng.standard_normal(batch)
        attempts += batch
        z = z[z > 0.0][:need]
        kept.append(z)
        have += z.size
    return IntervalSeries(np.concatenate(kept),
                          f"gaussian mean={cfg.mean:g} sigma={cfg.spread:g} seed={seed}")


def lognormal_intervals(cfg, seed=0):
    _require(cfg, "lognormal")
    z = SplitMix64(seed).standard_normal(cfg.n)
    values = np.exp(cfg.mean + cfg.spread * z)
    values[values == 0.0] = np.finfo(np.float64).tiny
    return IntervalSeries(values, f"lognormal mu={cfg.mean:g} sigma={cfg.spread:g} seed={seed}")


def distribution_intervals(cfg, seed=0):
    return {"uniform": uniform_intervals,
            "gaussian": gaussian_intervals,
            "lognormal": lognormal_intervals}[cfg.kind](cfg, seed)
