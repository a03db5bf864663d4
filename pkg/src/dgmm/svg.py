"""Radar charts as hand-written SVG 1.1 on a fixed 0..4 radial scale."""

from __future__ import annotations

import math
from fractions import Fraction
from xml.sax.saxutils import escape

from dgmm.analytics import ActivityProfile, DimensionProfile

SCALE_MAX = 4
SIZE = 600
CENTER = SIZE / 2
RADIUS = 200
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


def _fmt(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _point(axis: int, n_axes: int, value: float) -> tuple[float, float]:
    angle = -math.pi / 2 + 2 * math.pi * axis / n_axes
    r = RADIUS * value / SCALE_MAX
    return CENTER + r * math.cos(angle), CENTER + r * math.sin(angle)


def _points(values: list[float]) -> str:
    n = len(values)
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (_point(i, n, v) for i, v in enumerate(values)))


def _clamp(v: Fraction | None) -> float:
    return 0.0 if v is None else min(max(float(v), 0.0), float(SCALE_MAX))


def radar_svg(title: str, labels: list[str], series: list[tuple[str, list[float]]]) -> str:
    """One axis per label, one closed polygon per series."""
    if not labels:
        raise ValueError("radar chart needs at least one axis")
    n = len(labels)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="#ffffff"/>',
        f'<text x="{_fmt(CENTER)}" y="30" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
        '<g class="grid" fill="none" stroke="#cccccc" stroke-width="1">',
    ]
    for ring in range(1, SCALE_MAX + 1):
        out.append(f'<polygon class="ring" data-value="{ring}" points="{_points([ring] * n)}"/>')
    out.append("</g>")
    out.append('<g class="axes" stroke="#888888" stroke-width="1">')
    for i in range(n):
        x, y = _point(i, n, SCALE_MAX)
        out.append(
            f'<line class="axis" x1="{_fmt(CENTER)}" y1="{_fmt(CENTER)}" x2="{_fmt(x)}" y2="{_fmt(y)}"/>'
        )
    out.append("</g>")
    out.append('<g class="labels" font-family="sans-serif" font-size="12" fill="#333333">')
    for i, label in enumerate(labels):
        x, y = _point(i, n, SCALE_MAX * 1.12)
        anchor = "middle" if abs(x - CENTER) < 1 else ("start" if x > CENTER else "end")
        out.append(f'<text class="axis-label" x="{_fmt(x)}" y="{_fmt(y)}" text-anchor="{anchor}">{escape(label)}</text>')
    for ring in range(SCALE_MAX + 1):
        x, y = _point(0, n, ring)
        out.append(f'<text class="scale" x="{_fmt(x + 4)}" y="{_fmt(y - 2)}" font-size="10">{ring}</text>')
    out.append("</g>")
    for k, (name, values) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        out.append(
            f'<polygon class="series" data-series="{escape(name)}" points="{_points(values)}" '
            f'fill="{color}" fill-opacity="0.2" stroke="{color}" stroke-width="2"/>'
        )
    if len(series) > 1:
        for k, (name, _) in enumerate(series):
            y = SIZE - 20 - 18 * (len(series) - 1 - k)
            color = PALETTE[k % len(PALETTE)]
            out.append(f'<rect x="20" y="{y - 10}" width="12" height="12" fill="{color}"/>')
            out.append(
                f'<text x="38" y="{y}" font-family="sans-serif" font-size="12">{escape(name)}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_radar_svg(
    profile: DimensionProfile | ActivityProfile,
    level_names: dict[int, str] | None = None,
    title: str | None = None,
) -> str:
    """Radar chart for a dimension profile (one polygon) or an activity
    profile (one axis per activity, one polygon per level)."""
    level_names = level_names or {}
    if isinstance(profile, DimensionProfile):
        ids = list(profile.entries)
        labels = [profile.names[d] for d in ids]
        name = level_names.get(profile.level, f"Level {profile.level}")
        series = [(name, [_clamp(profile.entries[d]) for d in ids])]
        title = title or f"Dimension averages at level {profile.level} ({name})"
    elif isinstance(profile, ActivityProfile):
        labels = [abbr for _, abbr in profile.activities]
        series = [
            (
                f"Level {lv} ({level_names[lv]})" if lv in level_names else f"Level {lv}",
                [_clamp(profile.rows[(aid, lv)]) for aid, _ in profile.activities],
            )
            for lv in profile.levels
        ]
        title = title or f"{profile.dimension_name}: activity averages by level"
    else:
        raise TypeError(f"cannot chart {type(profile).__name__}")
    return radar_svg(title, labels, series)
