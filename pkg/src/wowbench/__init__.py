"""Scoring engine for embodied world-model benchmarks.

Raw measurements are clipped to absolute anchors, pushed through a calibrated
monotone mapping into desirability scores on (0, 100), averaged within metric
groups and combined into an overall leaderboard score.
"""

from .registry import (
    AggregationMode,
    Direction,
    EvaluationRecord,
    Family,
    GroupSpec,
    MetricSpec,
    RegistryConfig,
    load_registry,
    serialize_registry,
    validate_record,
)
from .normalization import apply_family, clip, desirability, prescale

__version__ = "0.1.0"
