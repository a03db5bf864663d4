"""Rating engine: performance scale, multi-respondent aggregation, applicable
counts, passing thresholds and maturity-level determination.

All aggregates are exact ``Fraction`` values so that comparisons against the
applicability cutoff never depend on float representation.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Mapping, Sequence

from dgmm.errors import ValidationError

if TYPE_CHECKING:
    from dgmm.catalog import MaturityModel
    from dgmm.ingest import ResponseSet

MEDIAN_LOW = "median-low"
MEAN = "mean"
POLICIES = (MEDIAN_LOW, MEAN)

NOT_APPLICABLE = 0
RATING_VALUES = (0, 1, 2, 3, 4)

SCALE_LABELS = {
    4: "Completely applicable",
    3: "Largely applicable",
    2: "Partially applicable",
    1: "Slightly applicable",
    0: "Not applicable",
}


def percentage_to_rating(extent: float | None) -> int:
    """Map an extent of applicability (percent) onto the 0..4 scale.

    ``None`` is the not-applicable mark and maps to 0. Bands are half-open:
    [0, 33.3) -> 1, [33.3, 66.7) -> 2, [66.7, 80) -> 3, [80, 100] -> 4.
    """
    if extent is None:
        return NOT_APPLICABLE
    if isinstance(extent, bool) or not isinstance(extent, (int, float, Fraction)):
        raise TypeError(f"extent must be a number or None, got {type(extent).__name__}")
    if math.isnan(extent) or not (0 <= extent <= 100):
        raise ValueError(f"extent {extent} outside [0, 100]")
    if extent >= 80:
        return 4
    if extent >= 66.7:
        return 3
    if extent >= 33.3:
        return 2
    return 1


def aggregate_ratings(ratings: Sequence[int], policy: str = MEDIAN_LOW) -> Fraction:
    """Combine several respondents' ratings of one statement into one DPR.

    ``median-low`` takes the lower of the two middle values for an even
    count, so an evenly split panel does not certify applicability.
    """
    if not ratings:
        raise ValueError("cannot aggregate an empty list of ratings")
    if policy == MEDIAN_LOW:
        return Fraction(statistics.median_low(ratings))
    if policy == MEAN:
        return Fraction(sum(ratings), len(ratings))
    raise ValueError(f"unknown aggregation policy {policy!r}; expected one of {POLICIES}")


def passing_threshold(total_statements: int, threshold_ratio: Fraction | float = Fraction(4, 5)) -> int:
    """Round-half-up of ``total_statements * threshold_ratio``."""
    if total_statements < 0:
        raise ValueError("total_statements must be >= 0")
    ratio = threshold_ratio if isinstance(threshold_ratio, Fraction) else Fraction(str(threshold_ratio))
    return math.floor(total_statements * ratio + Fraction(1, 2))


@dataclass(frozen=True)
class StatementScore:
    statement_id: str
    ratings: tuple[int, ...]
    aggregate: Fraction
    applicable: bool


@dataclass(frozen=True)
class LevelScore:
    level: int
    total_statements: int
    applicable_count: int
    passing_threshold: int
    passed: bool
    statement_scores: tuple[StatementScore, ...] = ()


@dataclass(frozen=True)
class MaturityResult:
    gml: int
    level_scores: tuple[LevelScore, ...]
    warnings: tuple[str, ...]
    determination_bound: int
    policy: str = MEDIAN_LOW

    def level_score(self, level: int) -> LevelScore:
        for ls in self.level_scores:
            if ls.level == level:
                return ls
        raise KeyError(f"level {level} was not assessed")


def score_statements(
    level: int, responses: ResponseSet, model: MaturityModel, policy: str = MEDIAN_LOW
) -> tuple[StatementScore, ...]:
    out = []
    missing = []
    for st in model.statements_at(level):
        ratings = responses.ratings_for(st.id)
        if len(ratings) != len(responses.respondents):
            missing.append(st.id)
            continue
        agg = aggregate_ratings(ratings, policy)
        out.append(StatementScore(st.id, ratings, agg, agg >= model.applicability_cutoff))
    if missing:
        raise ValidationError(f"coverage gap at level {level}", [f"no complete ratings for {s}" for s in missing])
    return tuple(out)


def count_applicable(level: int, scores: Mapping[str, Fraction], model: MaturityModel) -> int:
    """Number of the level's statements whose aggregate meets the cutoff."""
    sids = [s.id for s in model.statements_at(level)]
    missing = [sid for sid in sids if sid not in scores]
    if missing:
        raise ValidationError(f"coverage gap at level {level}", [f"no score for {s}" for s in missing])
    return sum(1 for sid in sids if scores[sid] >= model.applicability_cutoff)


def evaluate_level(
    level: int, responses: ResponseSet, model: MaturityModel, policy: str = MEDIAN_LOW
) -> LevelScore:
    model.level(level)
    scores = score_statements(level, responses, model, policy)
    na = count_applicable(level, {s.statement_id: s.aggregate for s in scores}, model)
    total = len(scores)
    pt = passing_threshold(total, model.threshold_ratio)
    return LevelScore(level, total, na, pt, na >= pt, scores)


def maturity_from_counts(
    applicable_counts: Sequence[int], thresholds: Sequence[int]
) -> tuple[int, list[str]]:
    """Highest level b (1-based) with NA[b] >= PT[b], and profile warnings.

    Passes need not be contiguous: a failed lower level does not cap the
    result, but it is reported.
    """
    if len(applicable_counts) != len(thresholds):
        raise ValueError("applicable_counts and thresholds differ in length")
    passed = [na >= pt for na, pt in zip(applicable_counts, thresholds)]
    gml = max((i + 1 for i, ok in enumerate(passed) if ok), default=0)
    warnings = []
    if gml == 0:
        warnings.append("no level passed")
    else:
        failed_below = [i + 1 for i in range(gml - 1) if not passed[i]]
        if failed_below:
            levels = ", ".join(map(str, failed_below))
            warnings.append(f"non-contiguous pass profile: level(s) {levels} below level {gml} failed")
    return gml, warnings


def determine_maturity(
    responses: ResponseSet,
    model: MaturityModel,
    policy: str = MEDIAN_LOW,
) -> MaturityResult:
    """Score every assessed level bottom-up and determine the maturity level."""
    bound = responses.max_level or model.max_level
    scores = tuple(evaluate_level(b, responses, model, policy) for b in range(1, bound + 1))
    gml, warnings = maturity_from_counts(
        [s.applicable_count for s in scores], [s.passing_threshold for s in scores]
    )
    if bound < model.max_level:
        warnings.append(f"determination truncated at level {bound}")
    return MaturityResult(gml, scores, tuple(warnings), bound, policy)
