"""Digital game maturity assessment engine."""

__version__ = "0.1.0"

from dgmm.catalog import MaturityModel, builtin_dgmm, load_model, validate_model
from dgmm.ingest import ResponseSet, merge_response_sets, parse_responses
from dgmm.scoring import (
    MEAN,
    MEDIAN_LOW,
    aggregate_ratings,
    determine_maturity,
    evaluate_level,
    passing_threshold,
    percentage_to_rating,
)

__all__ = [
    "MEAN",
    "MEDIAN_LOW",
    "MaturityModel",
    "ResponseSet",
    "aggregate_ratings",
    "builtin_dgmm",
    "determine_maturity",
    "evaluate_level",
    "load_model",
    "merge_response_sets",
    "parse_responses",
    "passing_threshold",
    "percentage_to_rating",
    "validate_model",
]
