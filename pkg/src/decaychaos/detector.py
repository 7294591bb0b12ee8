"""Imperfect-detector model applied to an ideal event stream.

:func:`degrade` composes the stages in a fixed order:

1. background events are merged in,
2. every event (signal or background) survives with probability ``efficiency``,
3. a non-paralyzable dead time removes events too close to the last recorded one,
4. timestamps are rounded to the clock quantum and coincident events collapse.

Each stochastic stage draws from its own sub-stream of the seed.
"""
from dataclasses import dataclass
import logging
from typing import NamedTuple

import numpy as np

from ._kernels import dead_time_mask
from .errors import InvalidConfig, InvalidHorizon
from .rng import SplitMix64, derive_seed
from .series import EventTimestamps

log = logging.getLogger(__name__)

_TAG_BACKGROUND = 1
_TAG_THIN = 2


@dataclass(frozen=True)
class DetectorConfig:
    efficiency: float = 1.0
    dead_time: float = 0.0
    quantum: float = 0.0
    background_rate: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise InvalidConfig(f"efficiency must be in (0, 1], got {self.efficiency}")
        for name in ("dead_time", "quantum", "background_rate"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0.0):
                raise InvalidConfig(f"{name} must be >= 0, got {value}")

    @property
    def is_identity(self):
        return (self.efficiency == 1.0 and self.dead_time == 0.0
                and self.quantum == 0.0 and self.background_rate == 0.0)


class QuantizeResult(NamedTuple):
    timestamps: EventTimestamps
    n_collapsed: int


class BackgroundResult(NamedTuple):
    timestamps: EventTimestamps
    n_background: int
    n_collapsed: int


def thin(ts, p, seed=0):
    """Keep each event independently with probability ``p``."""
    if not 0.0 < p <= 1.0:
        raise InvalidConfig(f"efficiency must be in (0, 1], got {p}")
    if p == 1.0:
        return ts
    u = SplitMix64(seed).random(len(ts))
    return EventTimestamps(ts.times[u < p], ts.label)


def apply_dead_time(ts, dead_time):
    """Non-paralyzable dead time: record an event iff it is at least
    ``dead_time`` after the previously recorded one."""
    if not dead_time >= 0.0:
        raise InvalidConfig(f"dead_time must be >= 0, got {dead_time}")
    if dead_time == 0.0:
        return ts
    keep = dead_time_mask(np.ascontiguousarray(ts.times), float(dead_time))
    return EventTimestamps(ts.times[keep], ts.label)


def _collapse(times):
    unique = np.unique(times)
    return unique, times.size - unique.size


def quantize(ts, quantum):
    """Round to the nearest multiple of ``quantum``; ties collapse to one event."""
    if not quantum >= 0.0:
        raise InvalidConfig(f"quantum must be >= 0, got {quantum}")
    if quantum == 0.0:
        return QuantizeResult(ts, 0)
    times, collapsed = _collapse(np.rint(ts.times / quantum) * quantum)
    if collapsed:
        log.info("quantization at %g s collapsed %d coincident events", quantum, collapsed)
    return QuantizeResult(EventTimestamps(times, ts.label), collapsed)


def poisson_stream(rate, horizon, seed=0):
    """Event times of a homogeneous Poisson process on ``[0, horizon]``."""
    if rate == 0.0 or horizon == 0.0:
        return np.empty(0)
    rng = SplitMix64(seed)
    expected = rate * horizon
    chunk = int(expected + 10.0 * np.sqrt(expected) + 16)
    pieces = []
    last = 0.0
    while True:
        gaps = -np.log(rng.random_oc(chunk)) / rate
        times = last + np.cumsum(gaps)
        if times[-1] > horizon:
            pieces.append(times[times <= horizon])
            break
        pieces.append(times)
        last = times[-1]
    return np.concatenate(pieces)


def add_background(ts, rate, horizon=None, seed=0):
    """Merge a Poisson(``rate``) stream on ``[0, horizon]`` into ``ts``."""
    if not rate >= 0.0:
        raise InvalidConfig(f"background_rate must be >= 0, got {rate}")
    last = ts.times[-1] if len(ts) else 0.0
    if horizon is None:
        horizon = last
    if not horizon >= last:
        raise InvalidHorizon(f"horizon {horizon} precedes last timestamp {last}")
    if rate == 0.0:
        return BackgroundResult(ts, 0, 0)
    extra = poisson_stream(rate, horizon, seed)
    times, collapsed = _collapse(np.concatenate((ts.times, extra)))
    return BackgroundResult(EventTimestamps(times, ts.label), extra.size, collapsed)


def degrade(ts, cfg, seed=0, stats=None):
    """Apply background, thinning, dead time and quantization, in that order.

    ``stats``, when a dict, receives per-stage event counts.
    """
    n_in = len(ts)
    merged = add_background(ts, cfg.background_rate, seed=derive_seed(seed, _TAG_BACKGROUND))
    thinned = thin(merged.timestamps, cfg.efficiency, seed=derive_seed(seed, _TAG_THIN))
    live = apply_dead_time(thinned, cfg.dead_time)
    out, collapsed = quantize(live, cfg.quantum)
    counts = {
        "input": n_in,
        "background_added": merged.n_background,
        "after_background": len(merged.timestamps),
        "after_thinning": len(thinned),
        "after_dead_time": len(live),
        "collapsed": merged.n_collapsed + collapsed,
        "output": len(out),
    }
    log.debug("degrade: %s", counts)
    if stats is not None:
        stats.update(counts)
    return out
