"""Delay-coordinate test for deterministic chaos in event interval series."""
__version__ = "0.1.0"

from .analysis import (CorrelationCurve, DimensionEstimate, SurrogateReport, Verdict,
                       correlation_dimension, correlation_integral, estimate_dimension,
                       false_nearest_neighbors, surrogate_test)
from .detector import (DetectorConfig, add_background, apply_dead_time, degrade,
                       quantize, thin)
from .generators import (DecayConfig, DistributionConfig, LogisticConfig,
                         exponential_intervals, gaussian_intervals, logistic_orbit,
                         lognormal_intervals, uniform_intervals)
from .ingest import read_counts_per_bin, read_events, write_events
from .rng import SplitMix64
from .series import (EmbeddingSpec, EventTimestamps, IntervalSeries, PointCloud,
                     embed, intervals_from_timestamps, project)
