"""Profile data for radar charts and gap analysis toward a target level."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from dgmm.scoring import MEAN, MEDIAN_LOW, passing_threshold, score_statements

if TYPE_CHECKING:
    from dgmm.catalog import MaturityModel
    from dgmm.ingest import ResponseSet


@dataclass(frozen=True)
class DimensionProfile:
    level: int
    policy: str
    entries: dict[int, Fraction | None]
    names: dict[int, str]


@dataclass(frozen=True)
class ActivityProfile:
    dimension_id: int
    dimension_name: str
    policy: str
    activities: tuple[tuple[int, str], ...]
    levels: tuple[int, ...]
    rows: dict[tuple[int, int], Fraction | None]


@dataclass(frozen=True)
class GapReport:
    target_level: int
    policy: str
    total_statements: int
    applicable_count: int
    passing_threshold: int
    shortfall: int
    failing_statements: tuple[tuple[str, Fraction], ...]
    per_activity_failures: dict[int, int]
    per_dimension_failures: dict[int, int]


def _mean(values: list[Fraction]) -> Fraction | None:
    return sum(values, Fraction(0)) / len(values) if values else None


def _aggregates(level, responses, model, policy) -> dict[str, Fraction]:
    return {s.statement_id: s.aggregate for s in score_statements(level, responses, model, policy)}


def dimension_profile(
    level: int, responses: ResponseSet, model: MaturityModel, policy: str = MEAN
) -> DimensionProfile:
    """Mean aggregated DPR per dimension at one level.

    A dimension with no statements at the level gets ``None``.
    """
    model.level(level)
    agg = _aggregates(level, responses, model, policy)
    by_dim: dict[int, list[Fraction]] = {d.id: [] for d in model.dimensions}
    for st in model.statements_at(level):
        by_dim[model.activity(st.aid).dimension_id].append(agg[st.id])
    return DimensionProfile(
        level,
        policy,
        {d: _mean(v) for d, v in by_dim.items()},
        {d.id: d.name for d in model.dimensions},
    )


def activity_profile(
    dimension_id: int, responses: ResponseSet, model: MaturityModel, policy: str = MEAN
) -> ActivityProfile:
    """Mean aggregated DPR per (activity, level) for one dimension's GDPAs."""
    dim = model.dimension(dimension_id)
    acts = model.activities_of(dimension_id)
    bound = responses.max_level or model.max_level
    levels = tuple(range(1, bound + 1))
    rows: dict[tuple[int, int], Fraction | None] = {}
    for lv in levels:
        agg = _aggregates(lv, responses, model, policy)
        for a in acts:
            rows[(a.aid, lv)] = _mean([agg[s.id] for s in model.statements_at(lv) if s.aid == a.aid])
    return ActivityProfile(
        dim.id, dim.name, policy, tuple((a.aid, a.abbreviation) for a in acts), levels, rows
    )


def gap_to_level(
    target_level: int, responses: ResponseSet, model: MaturityModel, policy: str = MEDIAN_LOW
) -> GapReport:
    """Statements below the cutoff at ``target_level``, weakest first.

    Failing statements are listed even when the level already passes.
    """
    model.level(target_level)
    bound = responses.max_level or model.max_level
    if target_level > bound:
        raise KeyError(f"level {target_level} was not assessed (responses stop at level {bound})")
    stmts = model.statements_at(target_level)
    agg = _aggregates(target_level, responses, model, policy)
    position = {s.id: i for i, s in enumerate(stmts)}
    failing = sorted(
        ((s.id, agg[s.id]) for s in stmts if agg[s.id] < model.applicability_cutoff),
        key=lambda item: (item[1], position[item[0]]),
    )
    total = len(stmts)
    na = total - len(failing)
    pt = passing_threshold(total, model.threshold_ratio)
    acts = Counter(model.statement(sid).aid for sid, _ in failing)
    dims = Counter(model.activity(aid).dimension_id for aid in acts.elements())
    return GapReport(
        target_level=target_level,
        policy=policy,
        total_statements=total,
        applicable_count=na,
        passing_threshold=pt,
        shortfall=max(0, pt - na),
        failing_statements=tuple(failing),
        per_activity_failures={a.aid: acts.get(a.aid, 0) for a in model.activities},
        per_dimension_failures={d.id: dims.get(d.id, 0) for d in model.dimensions},
    )
