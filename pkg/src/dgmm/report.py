"""Assessment bundle assembly, JSON round-trip and markdown rendering."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from dgmm import __version__
from dgmm.agreement import AgreementReport, PairwiseKappa, agreement_by_level, significance_stars
from dgmm.analytics import (
    ActivityProfile,
    DimensionProfile,
    GapReport,
    activity_profile,
    dimension_profile,
    gap_to_level,
)
from dgmm.catalog import MaturityModel, dump_model
from dgmm.errors import ComputationError, ParseError
from dgmm.ingest import ResponseSet
from dgmm.scoring import MEAN, MEDIAN_LOW, LevelScore, MaturityResult, StatementScore, determine_maturity

LEVEL_ONE_NOTE = (
    "Level 1 statements describe missing practices; the same applicability rule "
    "(aggregate >= cutoff) is applied to them as to every other level."
)
AGREEMENT_NOTE = "Agreement items per level are all statements of that level."


@dataclass(frozen=True)
class AssessmentBundle:
    tool_version: str
    model_name: str
    model_fingerprint: str
    organization: str
    respondents: tuple[str, ...]
    aggregation: str
    profile_aggregation: str
    level_names: dict[int, str]
    activity_names: dict[int, str]
    maturity: MaturityResult
    dimension_profiles: tuple[DimensionProfile, ...]
    activity_profiles: tuple[ActivityProfile, ...]
    gap: GapReport | None
    agreement: tuple[AgreementReport, ...]
    agreement_error: str | None = None

    @property
    def max_model_level(self) -> int:
        return max(self.level_names)


def model_fingerprint(model: MaturityModel) -> str:
    return hashlib.sha256(dump_model(model).encode("utf-8")).hexdigest()


def build_bundle(
    responses: ResponseSet,
    model: MaturityModel,
    aggregation: str = MEDIAN_LOW,
    profile_aggregation: str = MEAN,
) -> AssessmentBundle:
    """Run every analysis over one response set with one policy."""
    result = determine_maturity(responses, model, aggregation)
    bound = result.determination_bound
    dims = tuple(dimension_profile(b, responses, model, profile_aggregation) for b in range(1, bound + 1))
    acts = tuple(activity_profile(d.id, responses, model, profile_aggregation) for d in model.dimensions)
    gap = gap_to_level(result.gml + 1, responses, model, aggregation) if result.gml < bound else None
    try:
        agreement = tuple(agreement_by_level(responses, model))
        agreement_error = None
    except ComputationError as exc:
        agreement, agreement_error = (), str(exc)
    level_names = {0: model.level_name(0), **{lv.ordinal: lv.name for lv in model.levels}}
    return AssessmentBundle(
        tool_version=__version__,
        model_name=model.name,
        model_fingerprint=model_fingerprint(model),
        organization=responses.organization,
        respondents=tuple(responses.respondents),
        aggregation=aggregation,
        profile_aggregation=profile_aggregation,
        level_names=level_names,
        activity_names={a.aid: a.abbreviation for a in model.activities},
        maturity=result,
        dimension_profiles=dims,
        activity_profiles=acts,
        gap=gap,
        agreement=agreement,
        agreement_error=agreement_error,
    )


# -- JSON --------------------------------------------------------------------


def _q(x: Fraction | None) -> str | None:
    if x is None:
        return None
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _unq(s: str | None) -> Fraction | None:
    return None if s is None else Fraction(s)


def _statement_to_dict(s: StatementScore) -> dict:
    return {"id": s.statement_id, "ratings": list(s.ratings), "aggregate": _q(s.aggregate), "applicable": s.applicable}


def _level_to_dict(ls: LevelScore) -> dict:
    return {
        "level": ls.level,
        "total_statements": ls.total_statements,
        "applicable_count": ls.applicable_count,
        "passing_threshold": ls.passing_threshold,
        "passed": ls.passed,
        "statements": [_statement_to_dict(s) for s in ls.statement_scores],
    }


def gap_to_dict(g: GapReport) -> dict:
    return {
        "target_level": g.target_level,
        "policy": g.policy,
        "total_statements": g.total_statements,
        "applicable_count": g.applicable_count,
        "passing_threshold": g.passing_threshold,
        "shortfall": g.shortfall,
        "failing_statements": [{"id": sid, "aggregate": _q(v)} for sid, v in g.failing_statements],
        "per_activity_failures": [{"aid": a, "count": c} for a, c in g.per_activity_failures.items()],
        "per_dimension_failures": [{"dimension_id": d, "count": c} for d, c in g.per_dimension_failures.items()],
    }


def agreement_to_dict(a: AgreementReport) -> dict:
    return {
        "level": a.level,
        "n_raters": a.n_raters,
        "n_items": a.n_items,
        "kendall_w": _q(a.kendall_w),
        "chi_square": _q(a.chi_square),
        "chi_square_df": a.chi_square_df,
        "kendall_p": a.kendall_p,
        "fleiss_kappa": _q(a.fleiss_kappa),
        "fleiss_z": a.fleiss_z,
        "fleiss_p": a.fleiss_p,
        "band": a.band,
        "pairwise_cohen": [
            {"rater_a": p.rater_a, "rater_b": p.rater_b, "kappa": _q(p.kappa), "degenerate": p.degenerate}
            for p in a.pairwise_cohen
        ],
        "flags": list(a.flags),
    }


def bundle_to_dict(b: AssessmentBundle) -> dict[str, Any]:
    """Plain-JSON form. Exact rationals are written as ``"p/q"`` strings."""
    m = b.maturity
    return {
        "tool": {"name": "dgmm", "version": b.tool_version},
        "model": {"name": b.model_name, "fingerprint": b.model_fingerprint},
        "organization": b.organization,
        "respondents": list(b.respondents),
        "policy": {"aggregation": b.aggregation, "profile_aggregation": b.profile_aggregation},
        "level_names": [{"level": k, "name": v} for k, v in b.level_names.items()],
        "activity_names": [{"aid": k, "abbreviation": v} for k, v in b.activity_names.items()],
        "maturity": {
            "gml": m.gml,
            "name": b.level_names[m.gml],
            "determination_bound": m.determination_bound,
            "policy": m.policy,
            "warnings": list(m.warnings),
            "levels": [_level_to_dict(ls) for ls in m.level_scores],
        },
        "dimension_profiles": [
            {
                "level": p.level,
                "policy": p.policy,
                "entries": [
                    {"dimension_id": d, "name": p.names[d], "average": _q(v)} for d, v in p.entries.items()
                ],
            }
            for p in b.dimension_profiles
        ],
        "activity_profiles": [
            {
                "dimension_id": p.dimension_id,
                "dimension_name": p.dimension_name,
                "policy": p.policy,
                "activities": [{"aid": a, "abbreviation": ab} for a, ab in p.activities],
                "levels": list(p.levels),
                "cells": [{"aid": a, "level": lv, "average": _q(v)} for (a, lv), v in p.rows.items()],
            }
            for p in b.activity_profiles
        ],
        "gap": gap_to_dict(b.gap) if b.gap else None,
        "agreement": [agreement_to_dict(a) for a in b.agreement],
        "agreement_error": b.agreement_error,
    }


def render_json(b: AssessmentBundle) -> str:
    return json.dumps(bundle_to_dict(b), indent=2, ensure_ascii=False) + "\n"


def bundle_from_dict(doc: dict[str, Any]) -> AssessmentBundle:
    try:
        return _bundle_from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"not a valid assessment report: {exc!r}") from exc


def _bundle_from_dict(doc: dict[str, Any]) -> AssessmentBundle:
    m = doc["maturity"]
    levels = tuple(
        LevelScore(
            level=ls["level"],
            total_statements=ls["total_statements"],
            applicable_count=ls["applicable_count"],
            passing_threshold=ls["passing_threshold"],
            passed=ls["passed"],
            statement_scores=tuple(
                StatementScore(s["id"], tuple(s["ratings"]), _unq(s["aggregate"]), s["applicable"])
                for s in ls["statements"]
            ),
        )
        for ls in m["levels"]
    )
    maturity = MaturityResult(m["gml"], levels, tuple(m["warnings"]), m["determination_bound"], m["policy"])
    dims = tuple(
        DimensionProfile(
            p["level"],
            p["policy"],
            {e["dimension_id"]: _unq(e["average"]) for e in p["entries"]},
            {e["dimension_id"]: e["name"] for e in p["entries"]},
        )
        for p in doc["dimension_profiles"]
    )
    acts = tuple(
        ActivityProfile(
            p["dimension_id"],
            p["dimension_name"],
            p["policy"],
            tuple((a["aid"], a["abbreviation"]) for a in p["activities"]),
            tuple(p["levels"]),
            {(c["aid"], c["level"]): _unq(c["average"]) for c in p["cells"]},
        )
        for p in doc["activity_profiles"]
    )
    g = doc["gap"]
    gap = (
        GapReport(
            target_level=g["target_level"],
            policy=g["policy"],
            total_statements=g["total_statements"],
            applicable_count=g["applicable_count"],
            passing_threshold=g["passing_threshold"],
            shortfall=g["shortfall"],
            failing_statements=tuple((f["id"], _unq(f["aggregate"])) for f in g["failing_statements"]),
            per_activity_failures={e["aid"]: e["count"] for e in g["per_activity_failures"]},
            per_dimension_failures={e["dimension_id"]: e["count"] for e in g["per_dimension_failures"]},
        )
        if g
        else None
    )
    agreement = tuple(
        AgreementReport(
            level=a["level"],
            n_raters=a["n_raters"],
            n_items=a["n_items"],
            kendall_w=_unq(a["kendall_w"]),
            chi_square=_unq(a["chi_square"]),
            chi_square_df=a["chi_square_df"],
            kendall_p=a["kendall_p"],
            fleiss_kappa=_unq(a["fleiss_kappa"]),
            fleiss_z=a["fleiss_z"],
            fleiss_p=a["fleiss_p"],
            pairwise_cohen=tuple(
                PairwiseKappa(p["rater_a"], p["rater_b"], _unq(p["kappa"]), p["degenerate"])
                for p in a["pairwise_cohen"]
            ),
            band=a["band"],
            flags=tuple(a["flags"]),
        )
        for a in doc["agreement"]
    )
    return AssessmentBundle(
        tool_version=doc["tool"]["version"],
        model_name=doc["model"]["name"],
        model_fingerprint=doc["model"]["fingerprint"],
        organization=doc["organization"],
        respondents=tuple(doc["respondents"]),
        aggregation=doc["policy"]["aggregation"],
        profile_aggregation=doc["policy"]["profile_aggregation"],
        level_names={e["level"]: e["name"] for e in doc["level_names"]},
        activity_names={e["aid"]: e["abbreviation"] for e in doc["activity_names"]},
        maturity=maturity,
        dimension_profiles=dims,
        activity_profiles=acts,
        gap=gap,
        agreement=agreement,
        agreement_error=doc.get("agreement_error"),
    )


def parse_json_report(text: str) -> AssessmentBundle:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid report JSON: {exc}") from exc
    return bundle_from_dict(doc)


# -- markdown ----------------------------------------------------------------


def _num(x: Fraction | float | None, places: int = 2) -> str:
    return "n/a" if x is None else f"{float(x):.{places}f}"


def _level_label(b: AssessmentBundle, level: int) -> str:
    return f"Level {level} ({b.level_names[level]})"


def maturity_line(b: AssessmentBundle) -> str:
    m = b.maturity
    line = f"Maturity level: {m.gml} ({b.level_names[m.gml]})"
    if m.determination_bound < b.max_model_level:
        line += f", determined up to level {m.determination_bound}"
    return line


def agreement_table(reports, level_names: dict[int, str]) -> list[str]:
    out = [
        "| Level | Kendall's W | Chi-square | df | Fleiss kappa | Z | Band |",
        "|---|---|---|---|---|---|---|",
    ]
    for a in reports:
        out.append(
            f"| {level_names[a.level]} | {_num(a.kendall_w, 4)} | {_num(a.chi_square)}{significance_stars(a.kendall_p)} "
            f"| {a.chi_square_df} | {_num(a.fleiss_kappa, 4)} | {_num(a.fleiss_z)}{significance_stars(a.fleiss_p)} "
            f"| {a.band} |"
        )
    return out


def render_markdown(b: AssessmentBundle) -> str:
    m = b.maturity
    lines = [
        f"# Maturity assessment: {b.organization or 'unnamed organization'}",
        "",
        f"- Model: {b.model_name} (sha256 {b.model_fingerprint[:12]})",
        f"- Tool: dgmm {b.tool_version}",
        f"- Respondents: {len(b.respondents)}",
        f"- Aggregation: {b.aggregation} (profiles: {b.profile_aggregation})",
        "",
        f"**{maturity_line(b)}**",
        "",
        "## Level summary",
        "",
        "| Level | Total questions | Passing threshold | Applicable (NA) | Result |",
        "|---|---|---|---|---|",
    ]
    for ls in m.level_scores:
        verdict = "passed" if ls.passed else "not passed"
        lines.append(
            f"| {_level_label(b, ls.level)} | {ls.total_statements} | {ls.passing_threshold} "
            f"| {ls.applicable_count} | {verdict} |"
        )
    lines += ["", LEVEL_ONE_NOTE, ""]

    if m.warnings:
        lines += ["## Warnings", ""]
        lines += [f"- {w}" for w in m.warnings]
        lines.append("")

    if b.dimension_profiles:
        names = b.dimension_profiles[0].names
        lines += ["## Dimension profiles", "", f"Average DPR per dimension ({b.profile_aggregation}).", ""]
        lines.append("| Level | " + " | ".join(names.values()) + " |")
        lines.append("|---" * (len(names) + 1) + "|")
        for p in b.dimension_profiles:
            lines.append(
                f"| {_level_label(b, p.level)} | " + " | ".join(_num(p.entries[d]) for d in names) + " |"
            )
        lines.append("")

    lines += ["## Inter-rater agreement", ""]
    if b.agreement:
        lines += agreement_table(b.agreement, b.level_names)
        lines += ["", "Significant at p < 0.01 (*); significant at p < 0.05 (**).", AGREEMENT_NOTE, ""]
    else:
        lines += [f"Not computed: {b.agreement_error}", ""]

    if b.gap is not None:
        g = b.gap
        lines += [
            f"## Gap to {_level_label(b, g.target_level)}",
            "",
            f"Applicable {g.applicable_count} of {g.total_statements}, passing threshold "
            f"{g.passing_threshold}, shortfall {g.shortfall}.",
            "",
        ]
        if g.failing_statements:
            lines += ["| Statement | Activity | Aggregate DPR |", "|---|---|---|"]
            for sid, v in g.failing_statements:
                aid = int(sid.split(".")[2])
                lines.append(f"| {sid} | {b.activity_names[aid]} | {_num(v)} |")
            lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"
