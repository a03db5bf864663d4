"""Command-line front end: validate, assess, agreement, gap, chart.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 computation error.
Reports go to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from dgmm import __version__
from dgmm.agreement import agreement_by_level
from dgmm.analytics import activity_profile, dimension_profile, gap_to_level
from dgmm.catalog import builtin_dgmm, load_model, model_from_dict, validate_model
from dgmm.errors import DGMMError, ParseError
from dgmm.ingest import parse_responses
from dgmm.report import (
    AGREEMENT_NOTE,
    AssessmentBundle,
    agreement_to_dict,
    gap_to_dict,
    agreement_table,
    build_bundle,
    render_json,
    render_markdown,
)
from dgmm.scoring import MEAN, MEDIAN_LOW, POLICIES, determine_maturity
from dgmm.svg import render_radar_svg

MODEL_ENV = "DGMM_MODEL"


def resolve_model(path: str | None):
    path = path or os.environ.get(MODEL_ENV)
    return load_model(path) if path else builtin_dgmm()


def run_assess(
    model_path: str | None, responses_path: str, aggregation: str = MEDIAN_LOW
) -> AssessmentBundle:
    model = resolve_model(model_path)
    responses = parse_responses(responses_path, model)
    return build_bundle(responses, model, aggregation)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    path = args.model or os.environ.get(MODEL_ENV)
    if not path:
        problems = validate_model(builtin_dgmm())
        label = "bundled DGMM"
    else:
        label = path
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ParseError(f"{path}: cannot read model: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
        try:
            problems = validate_model(model_from_dict(doc))
        except ParseError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if problems:
        print(f"{label}: {len(problems)} violation(s)")
        for p in problems:
            print(f"  - {p}")
        return 3
    print(f"{label}: ok")
    return 0


def cmd_assess(args) -> int:
    bundle = run_assess(args.model, args.responses, args.aggregation)
    _write(render_json(bundle) if args.format == "json" else render_markdown(bundle), args.out)
    if args.charts_dir:
        out = Path(args.charts_dir)
        out.mkdir(parents=True, exist_ok=True)
        for p in bundle.dimension_profiles:
            (out / f"level-{p.level}-dimensions.svg").write_text(
                render_radar_svg(p, bundle.level_names), encoding="utf-8"
            )
        for p in bundle.activity_profiles:
            (out / f"dimension-{p.dimension_id}-activities.svg").write_text(
                render_radar_svg(p, bundle.level_names), encoding="utf-8"
            )
    return 0


def cmd_agreement(args) -> int:
    model = resolve_model(args.model)
    responses = parse_responses(args.responses, model)
    reports = agreement_by_level(responses, model)
    if args.format == "json":
        text = json.dumps([agreement_to_dict(r) for r in reports], indent=2) + "\n"
    else:
        names = {lv.ordinal: lv.name for lv in model.levels}
        text = "\n".join(agreement_table(reports, names)) + "\n\n"
        text += "Significant at p < 0.01 (*); significant at p < 0.05 (**).\n" + AGREEMENT_NOTE + "\n"
    _write(text, args.out)
    return 0


def cmd_gap(args) -> int:
    model = resolve_model(args.model)
    responses = parse_responses(args.responses, model)
    if args.level is None:
        result = determine_maturity(responses, model, args.aggregation)
        target = result.gml + 1
        if target > result.determination_bound:
            print(f"no unachieved level within the assessed range (maturity level {result.gml})")
            return 0
    else:
        target = args.level
    try:
        gap = gap_to_level(target, responses, model, args.aggregation)
    except KeyError as exc:
        raise ParseError(str(exc.args[0])) from None
    if args.format == "json":
        text = json.dumps(gap_to_dict(gap), indent=2) + "\n"
    else:
        lines = [
            f"Gap to level {target} ({model.level_name(target)}): applicable {gap.applicable_count} of "
            f"{gap.total_statements}, passing threshold {gap.passing_threshold}, shortfall {gap.shortfall}",
            "",
        ]
        for sid, agg in gap.failing_statements:
            st = model.statement(sid)
            lines.append(f"{sid}  [{model.activity(st.aid).abbreviation}]  {float(agg):.2f}  {st.text}")
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return 0


def cmd_chart(args) -> int:
    model = resolve_model(args.model)
    responses = parse_responses(args.responses, model)
    names = {lv.ordinal: lv.name for lv in model.levels}
    if args.dimension is not None:
        profile = activity_profile(args.dimension, responses, model, args.aggregation)
    else:
        profile = dimension_profile(args.level, responses, model, args.aggregation)
    _write(render_radar_svg(profile, names), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dgmm", description="Digital game maturity assessment")
    parser.add_argument("--version", action="version", version=f"dgmm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, responses=True, aggregation=MEDIAN_LOW, formats=True):
        p.add_argument("--model", help=f"model JSON (default: ${MODEL_ENV} or the bundled DGMM)")
        if responses:
            p.add_argument("--responses", required=True, help="responses CSV or JSON")
            p.add_argument("--aggregation", choices=POLICIES, default=aggregation)
        if formats:
            p.add_argument("--format", choices=("json", "md"), default="md")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("--model", help=f"model JSON (default: ${MODEL_ENV} or the bundled DGMM)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("assess", help="determine the maturity level and write a full report")
    common(p)
    p.add_argument("--charts-dir", help="also write radar SVGs into this directory")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("agreement", help="inter-rater agreement per level")
    p.add_argument("--model")
    p.add_argument("--responses", required=True)
    p.add_argument("--format", choices=("json", "md"), default="md")
    p.add_argument("--out")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("gap", help="failing statements blocking a level")
    common(p)
    p.add_argument("--level", type=int, help="target level (default: next unachieved)")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("chart", help="radar chart SVG")
    common(p, aggregation=MEAN, formats=False)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--level", type=int, help="dimension averages at this level")
    which.add_argument("--dimension", type=int, help="activity averages for this dimension id")
    p.set_defaults(func=cmd_chart)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DGMMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
