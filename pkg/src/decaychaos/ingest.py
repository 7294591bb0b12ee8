"""One-column CSV event files.

Two formats share one layout::

    # source: Am-241, GM tube
    # units: seconds
    t_seconds
    0.0
    0.0123

``timestamps_csv`` uses the header ``t_seconds`` and holds strictly
increasing absolute times; ``intervals_csv`` uses ``dt_seconds`` and holds
positive inter-event times. ``#`` lines are comments; ``# key: value``
comments are kept as metadata. The header line is optional. Values are
written with 17 significant digits, which round-trips every double exactly.
"""
import math
from pathlib import Path

import numpy as np

from .errors import (EmptyFile, EventIOError, MonotonicityError, ParseError,
                     UnsupportedForEmbedding)
from .series import EventTimestamps, IntervalSeries

TIMESTAMPS = "timestamps_csv"
INTERVALS = "intervals_csv"
HEADERS = {TIMESTAMPS: "t_seconds", INTERVALS: "dt_seconds"}
FORMATS = tuple(HEADERS)


def _check_format(fmt):
    if fmt not in HEADERS:
        raise ParseError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def _read_lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except FileNotFoundError as exc:
        raise EventIOError(path, "no such file") from exc
    except OSError as exc:
        raise EventIOError(path, exc.strerror or exc) from exc


def parse_events(lines, fmt=None, path=None):
    """Parse file lines; returns ``(values, fmt, metadata)``."""
    if fmt is not None:
        _check_format(fmt)
    meta = {}
    values = []
    numbers = []
    seen_header = False
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        if text.startswith("#"):
            key, sep, val = text[1:].partition(":")
            if sep and key.strip() and " " not in key.strip():
                meta[key.strip().lower()] = val.strip()
            continue
        try:
            value = float(text)
        except ValueError:
            if values or seen_header:
                raise ParseError(f"not a number: {text!r}", lineno, path) from None
            seen_header = True
            declared = {v: k for k, v in HEADERS.items()}.get(text.lower())
            if declared is None:
                raise ParseError(f"unrecognised header {text!r}", lineno, path)
            if fmt is not None and declared != fmt:
                raise ParseError(f"header {text!r} does not match format {fmt}", lineno, path)
            fmt = declared
            continue
        if not math.isfinite(value):
            raise ParseError(f"non-finite value {text!r}", lineno, path)
        values.append(value)
        numbers.append(lineno)
    if not values:
        raise EmptyFile("no data values", None, path)
    if fmt is None:
        raise ParseError("no header line and no format given", None, path)
    arr = np.array(values, dtype=np.float64)
    if fmt == INTERVALS:
        bad = np.flatnonzero(arr <= 0.0)
        if bad.size:
            raise ParseError("non-positive interval", numbers[bad[0]], path)
    else:
        if arr[0] < 0.0:
            raise ParseError("negative timestamp", numbers[0], path)
        bad = np.flatnonzero(np.diff(arr) <= 0.0)
        if bad.size:
            raise MonotonicityError("timestamps not strictly increasing",
                                    numbers[bad[0] + 1], path)
    return arr, fmt, meta


def read_events(path, fmt=None):
    """Read an event file as :class:`EventTimestamps` or :class:`IntervalSeries`.

    ``fmt`` may be omitted when the file carries its header line.
    """
    values, fmt, meta = parse_events(_read_lines(path), fmt, str(path))
    label = meta.get("source", Path(path).stem)
    if fmt == TIMESTAMPS:
        return EventTimestamps(values, label)
    dimensionless = meta.get("units", "seconds").lower() == "dimensionless"
    if dimensionless:
        return IntervalSeries(values, label, dimensionless=True)
    return IntervalSeries(values, label)


def format_events(series, fmt=None, notes=None):
    if fmt is None:
        fmt = TIMESTAMPS if isinstance(series, EventTimestamps) else INTERVALS
    _check_format(fmt)
    if isinstance(series, EventTimestamps):
        if fmt != TIMESTAMPS:
            raise ParseError("timestamps must be written as timestamps_csv")
        values = series.times
        units = "seconds"
    else:
        if fmt != INTERVALS:
            raise ParseError("intervals must be written as intervals_csv")
        values = series.values
        units = "dimensionless" if series.dimensionless else "seconds"
    lines = []
    if series.label:
        lines.append("# source: " + " ".join(series.label.split()))
    lines.append(f"# units: {units}")
    if notes:
        lines.append("# notes: " + " ".join(str(notes).split()))
    lines.append(HEADERS[fmt])
    lines.extend(format(float(v), ".17g") for v in values)
    return "\n".join(lines) + "\n"


def write_events(series, path, fmt=None, notes=None):
    text = format_events(series, fmt, notes)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise EventIOError(path, exc.strerror or exc) from exc


def read_counts_per_bin(path):
    """Refuse binned count data.

    Counts per time bin discard the order and spacing of individual events,
    so the interval series cannot be rebuilt from them. Always raises.
    """
    raise UnsupportedForEmbedding(
        f"{path}: counts-per-bin data cannot be delay-embedded; binned counts lose "
        f"the individual inter-event intervals. Export one timestamp per event "
        f"as {TIMESTAMPS} (header '{HEADERS[TIMESTAMPS]}') instead.")
