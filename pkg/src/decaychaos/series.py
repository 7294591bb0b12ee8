"""Interval and timestamp series, delay embedding, projections."""
from dataclasses import dataclass, field

import numpy as np

from .errors import (AxisOutOfRange, InvalidConfig, NonMonotonic,
                     SeriesTooShort, TooShort)


def _frozen(values, ndim=1):
    arr = np.array(values, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IntervalSeries:
    """Ordered inter-event times ``t_i``.

    Physical series (seconds) must be strictly positive. Map iterates are
    flagged ``dimensionless`` and only need to lie in [0, 1].
    """

    values: np.ndarray
    label: str = ""
    dimensionless: bool = False

    def __post_init__(self):
        arr = _frozen(self.values)
        object.__setattr__(self, "values", arr)
        if arr.size < 1:
            raise TooShort("interval series needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise InvalidConfig("interval series contains non-finite values")
        if self.dimensionless:
            if arr.min() < 0.0 or arr.max() > 1.0:
                raise InvalidConfig("dimensionless series must lie in [0, 1]")
        elif arr.min() <= 0.0:
            bad = int(np.argmax(arr <= 0.0))
            raise InvalidConfig(f"non-positive interval at index {bad}")

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, IntervalSeries):
            return NotImplemented
        return (self.label == other.label and self.dimensionless == other.dimensionless
                and np.array_equal(self.values, other.values))

    def scaled(self, factor):
        return IntervalSeries(self.values * factor, self.label, self.dimensionless)


@dataclass(frozen=True, eq=False)
class EventTimestamps:
    """Absolute event times in seconds since acquisition start, strictly increasing."""

    times: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = _frozen(self.times)
        object.__setattr__(self, "times", arr)
        if not np.all(np.isfinite(arr)):
            raise InvalidConfig("timestamps contain non-finite values")
        if arr.size and arr[0] < 0.0:
            raise InvalidConfig("first timestamp must be >= 0")
        steps = np.diff(arr)
        if steps.size and steps.min() <= 0.0:
            raise NonMonotonic(int(np.argmax(steps <= 0.0)) + 1)

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        if not isinstance(other, EventTimestamps):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.times, other.times)

    @classmethod
    def from_intervals(cls, series, start=0.0):
        """Cumulative sum of ``series`` with an event at ``start``."""
        times = start + np.concatenate(([0.0], np.cumsum(series.values)))
        return cls(times, series.label)


@dataclass(frozen=True)
class EmbeddingSpec:
    dimension: int = 3
    delay: int = 1

    def __post_init__(self):
        for name in ("dimension", "delay"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise InvalidConfig(f"embedding {name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))

    @property
    def window(self):
        """Number of series samples spanned by one embedded point."""
        return (self.dimension - 1) * self.delay + 1


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Embedded phase-space points, shape ``(M, m)``."""

    points: np.ndarray
    spec: EmbeddingSpec = field(default_factory=EmbeddingSpec)
    source_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points, ndim=2))

    def __len__(self):
        return self.points.shape[0]

    @property
    def dimension(self):
        return self.points.shape[1]


def intervals_from_timestamps(ts):
    """Successive differences of ``ts`` as an :class:`IntervalSeries`."""
    times = ts.times if isinstance(ts, EventTimestamps) else np.asarray(ts, dtype=np.float64)
    if times.size < 2:
        raise TooShort(f"need at least 2 timestamps, got {times.size}")
    steps = np.diff(times)
    if steps.min() <= 0.0:
        raise NonMonotonic(int(np.argmax(steps <= 0.0)) + 1)
    return IntervalSeries(steps, getattr(ts, "label", ""))


def embed(series, spec=None):
    """Delay-coordinate embedding with overlapping windows.

    Point ``j`` is ``(s[j], s[j + tau], ..., s[j + (m - 1) tau])``; there are
    ``N - (m - 1) tau`` of them. Values are copied, never altered.
    """
    spec = spec or EmbeddingSpec()
    values = series.values if isinstance(series, IntervalSeries) else np.asarray(series, dtype=np.float64)
    n = values.size
    if n < spec.window:
        raise SeriesTooShort(spec.window, n)
    count = n - (spec.dimension - 1) * spec.delay
    cols = [values[k * spec.delay:k * spec.delay + count] for k in range(spec.dimension)]
    return PointCloud(np.column_stack(cols), spec, getattr(series, "label", ""))


def project(cloud, axes):
    """Keep the coordinates listed in ``axes``, in that order."""
    axes = tuple(int(a) for a in axes)
    if not 1 <= len(axes) <= 3:
        raise AxisOutOfRange(f"expected 1 to 3 axes, got {len(axes)}")
    for a in axes:
        if not 0 <= a < cloud.dimension:
            raise AxisOutOfRange(f"axis {a} out of range for {cloud.dimension}-d cloud")
    return PointCloud(cloud.points[:, axes], cloud.spec, cloud.source_label)
