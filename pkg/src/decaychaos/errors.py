"""Exception hierarchy.

Every error carries the process exit code the CLI should use, so stage
failures map onto the documented codes without a lookup table.
"""


class DecayChaosError(Exception):
    exit_code = 1


class InvalidConfig(DecayChaosError, ValueError):
    exit_code = 2


class ParseError(DecayChaosError, ValueError):
    """Malformed input data; ``line`` is 1-based when known."""

    exit_code = 3

    def __init__(self, reason, line=None, path=None):
        self.reason = reason
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f"{':' if where else 'line '}{line}"
        super().__init__(f"{where}: {reason}" if where else reason)


class MonotonicityError(ParseError):
    pass


class EmptyFile(ParseError):
    pass


class TooShort(ParseError):
    pass


class NonMonotonic(ParseError):
    """Timestamps not strictly increasing; ``index`` is the first offender."""

    def __init__(self, index, reason=None):
        self.index = index
        super().__init__(reason or f"timestamps not strictly increasing at index {index}")


class EventIOError(DecayChaosError, OSError):
    exit_code = 3

    def __init__(self, path, cause):
        self.path = path
        self.cause = cause
        super().__init__(f"cannot access {path}: {cause}")


class UnsupportedForEmbedding(DecayChaosError):
    exit_code = 5


class AnalysisError(DecayChaosError):
    exit_code = 4


class SeriesTooShort(AnalysisError, ValueError):
    def __init__(self, required, actual):
        self.required = required
        self.actual = actual
        super().__init__(f"series has {actual} values, at least {required} required")


class AxisOutOfRange(AnalysisError, IndexError):
    pass


class TooFewPoints(AnalysisError, ValueError):
    pass


class EmptyScalingRegion(AnalysisError, ValueError):
    pass


class DegenerateSeries(AnalysisError, ValueError):
    pass


class SurrogateDegenerate(AnalysisError):
    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"surrogate {index}: {cause}")


class EmptyCloud(AnalysisError, ValueError):
    pass


class RejectionOverflow(InvalidConfig):
    pass


class InvalidHorizon(InvalidConfig):
    pass
