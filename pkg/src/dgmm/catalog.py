"""Maturity-model schema, the bundled DGMM catalog, and structural validation.

A model is pure data: levels, dimensions, activities (GDPAs) and the
statements of each level's questionnaire, plus the threshold policy used by
the scoring engine. Models are frozen once built.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import IO, Any, Iterable

from dgmm.errors import ParseError, ValidationError

DGMM_LEVEL_NAMES = ("Ad-Hoc", "Opportunistic", "Consistent", "Organized", "Optimized")

DGMM_DIMENSION_NAMES = (
    "Game Design Strategy",
    "Game Development Methodology",
    "Game Playability & Usability",
    "Business Performance",
)

# (abbreviation, dimension id) in activity-id order 1..18
DGMM_ACTIVITIES = (
    ("GDD", 1), ("TCM", 1), ("RMM", 1), ("GP", 1), ("Risk_Mgmt", 1),
    ("QA", 2), ("AM", 2), ("GED", 2),
    ("TM", 3), ("Mt_S", 3), ("FFA", 3), ("EU", 3),
    ("MO", 4), ("TTM", 4), ("RM", 4), ("MS", 4), ("I", 4), ("SC", 4),
)

# Statement counts per level (rows) and activity (columns) as printed in the
# framework table, with its printed row totals. The printed Optimized total
# (53) does not match its own cells (43).
PUBLISHED_COUNT_MATRIX = (
    (2, 1, 3, 1, 1, 2, 1, 2, 2, 1, 2, 2, 2, 2, 3, 2, 1, 1),
    (5, 2, 4, 2, 2, 3, 4, 3, 3, 2, 3, 3, 3, 3, 3, 2, 3, 1),
    (4, 3, 4, 2, 3, 4, 3, 3, 5, 2, 2, 3, 4, 2, 3, 3, 3, 1),
    (4, 4, 3, 4, 3, 4, 2, 3, 4, 2, 4, 3, 4, 2, 2, 3, 2, 1),
    (4, 2, 3, 3, 3, 3, 2, 2, 3, 2, 2, 2, 3, 2, 2, 3, 1, 1),
)
PUBLISHED_LEVEL_TOTALS = (31, 51, 54, 54, 53)

# Counts of the questionnaire text actually bundled. Differs from the
# printed matrix at Opportunistic RMM (3 vs 4), Mt_S (1 vs 2), FFA (2 vs 3):
# the published questionnaire lists fewer statements there.
DGMM_COUNT_MATRIX = (
    (2, 1, 3, 1, 1, 2, 1, 2, 2, 1, 2, 2, 2, 2, 3, 2, 1, 1),
    (5, 2, 3, 2, 2, 3, 4, 3, 3, 1, 2, 3, 3, 3, 3, 2, 3, 1),
    (4, 3, 4, 2, 3, 4, 3, 3, 5, 2, 2, 3, 4, 2, 3, 3, 3, 1),
    (4, 4, 3, 4, 3, 4, 2, 3, 4, 2, 4, 3, 4, 2, 2, 3, 2, 1),
    (4, 2, 3, 3, 3, 3, 2, 2, 3, 2, 2, 2, 3, 2, 2, 3, 1, 1),
)


@dataclass(frozen=True)
class Level:
    ordinal: int
    name: str


@dataclass(frozen=True)
class Dimension:
    id: int
    name: str


@dataclass(frozen=True)
class Activity:
    aid: int
    abbreviation: str
    full_name: str
    dimension_id: int


@dataclass(frozen=True)
class Statement:
    level: int
    aid: int
    ordinal: int
    text: str

    @property
    def id(self) -> str:
        return statement_id(self.level, self.aid, self.ordinal)


def statement_id(level: int, aid: int, ordinal: int) -> str:
    return f"S.{level}.{aid}.{ordinal}"


@dataclass(frozen=True)
class MaturityModel:
    name: str
    levels: tuple[Level, ...]
    dimensions: tuple[Dimension, ...]
    activities: tuple[Activity, ...]
    statements: tuple[Statement, ...]
    threshold_ratio: Fraction = Fraction(4, 5)
    applicability_cutoff: int = 3
    strict_dgmm: bool = False

    @property
    def max_level(self) -> int:
        return max((lv.ordinal for lv in self.levels), default=0)

    def level(self, ordinal: int) -> Level:
        for lv in self.levels:
            if lv.ordinal == ordinal:
                return lv
        raise KeyError(f"unknown level {ordinal}")

    def level_name(self, ordinal: int) -> str:
        if ordinal == 0:
            return "Below Ad-Hoc" if self.strict_dgmm else "Below level 1"
        return self.level(ordinal).name

    def activity(self, aid: int) -> Activity:
        return self._activities_by_id[aid]

    def dimension(self, dim_id: int) -> Dimension:
        for d in self.dimensions:
            if d.id == dim_id:
                return d
        raise KeyError(f"unknown dimension {dim_id}")

    def activities_of(self, dim_id: int) -> list[Activity]:
        return [a for a in self.activities if a.dimension_id == dim_id]

    def statements_at(self, level: int) -> list[Statement]:
        """Statements of one level, in (activity, ordinal) order."""
        return self._statements_by_level.get(level, [])

    def statement(self, sid: str) -> Statement:
        return self._statements_by_id[sid]

    def has_statement(self, sid: str) -> bool:
        return sid in self._statements_by_id

    def count_matrix(self) -> dict[tuple[int, int], int]:
        """Statement count per (level, aid) cell, zero cells included."""
        counts = Counter((s.level, s.aid) for s in self.statements)
        return {
            (lv.ordinal, a.aid): counts.get((lv.ordinal, a.aid), 0)
            for lv in self.levels
            for a in self.activities
        }

    @cached_property
    def _activities_by_id(self) -> dict[int, Activity]:
        return {a.aid: a for a in self.activities}

    @cached_property
    def _statements_by_id(self) -> dict[str, Statement]:
        return {s.id: s for s in self.statements}

    @cached_property
    def _statements_by_level(self) -> dict[int, list[Statement]]:
        out: dict[int, list[Statement]] = {}
        for s in sorted(self.statements, key=lambda s: (s.level, s.aid, s.ordinal)):
            out.setdefault(s.level, []).append(s)
        return out


def validate_model(model: MaturityModel) -> list[str]:
    """Return every structural violation found; an empty list means ok."""
    problems: list[str] = []

    if not model.levels:
        problems.append("no levels")
    ordinals = [lv.ordinal for lv in model.levels]
    if ordinals and ordinals != list(range(1, len(ordinals) + 1)):
        problems.append(f"level ordinals must be 1..{len(ordinals)} in ascending order, got {ordinals}")

    if not (0 < model.threshold_ratio <= 1):
        problems.append(f"threshold_ratio {model.threshold_ratio} outside (0, 1]")
    if not (1 <= model.applicability_cutoff <= 4):
        problems.append(f"applicability_cutoff {model.applicability_cutoff} outside 1..4")

    dim_ids = [d.id for d in model.dimensions]
    for dup in _duplicates(dim_ids):
        problems.append(f"duplicate dimension id {dup}")
    aids = [a.aid for a in model.activities]
    for dup in _duplicates(aids):
        problems.append(f"duplicate activity id {dup}")
    for a in model.activities:
        if a.dimension_id not in dim_ids:
            problems.append(f"activity {a.aid} ({a.abbreviation}): unknown dimension {a.dimension_id}")

    level_set, aid_set = set(ordinals), set(aids)
    for s in model.statements:
        if s.level not in level_set:
            problems.append(f"statement {s.id}: unknown level {s.level}")
        if s.aid not in aid_set:
            problems.append(f"statement {s.id}: unknown activity {s.aid}")
        if s.ordinal < 1:
            problems.append(f"statement {s.id}: ordinal must be >= 1")
        if not s.text.strip():
            problems.append(f"statement {s.id}: empty text")
    for dup in _duplicates(s.id for s in model.statements):
        problems.append(f"duplicate statement id {dup}")

    cells: dict[tuple[int, int], list[int]] = {}
    for s in model.statements:
        cells.setdefault((s.level, s.aid), []).append(s.ordinal)
    for (lv, aid), got in sorted(cells.items()):
        if sorted(got) != list(range(1, len(got) + 1)) and len(set(got)) == len(got):
            problems.append(f"cell (level {lv}, activity {aid}): ordinals {sorted(got)} are not contiguous from 1")

    if model.strict_dgmm:
        problems.extend(_dgmm_violations(model))
    return problems


def _dgmm_violations(model: MaturityModel) -> list[str]:
    problems: list[str] = []
    names = tuple(lv.name for lv in model.levels)
    if names != DGMM_LEVEL_NAMES:
        problems.append(f"DGMM levels must be {list(DGMM_LEVEL_NAMES)}, got {list(names)}")
    dims = tuple(d.name for d in sorted(model.dimensions, key=lambda d: d.id))
    if dims != DGMM_DIMENSION_NAMES:
        problems.append(f"DGMM dimensions must be {list(DGMM_DIMENSION_NAMES)}, got {list(dims)}")
    acts = tuple((a.abbreviation, a.dimension_id) for a in sorted(model.activities, key=lambda a: a.aid))
    if acts != DGMM_ACTIVITIES or [a.aid for a in model.activities] != list(range(1, 19)):
        problems.append("DGMM activities must be the 18 GDPAs with ids 1..18 in their dimension mapping")
    if problems:
        return problems

    counts = model.count_matrix()
    for li, row in enumerate(DGMM_COUNT_MATRIX):
        for ai, expected in enumerate(row):
            found = counts[(li + 1, ai + 1)]
            if found != expected:
                problems.append(
                    f"count mismatch at ({DGMM_LEVEL_NAMES[li]}, {DGMM_ACTIVITIES[ai][0]}): "
                    f"expected {expected}, found {found}"
                )
    return problems


def _duplicates(items: Iterable) -> list:
    c = Counter(items)
    return sorted((k for k, n in c.items() if n > 1), key=str)


# -- serialization -----------------------------------------------------------


def _ratio_to_json(r: Fraction) -> float | str:
    f = float(r)
    return f if Fraction(str(f)) == r else f"{r.numerator}/{r.denominator}"


def _ratio_from_json(v: Any) -> Fraction:
    if isinstance(v, bool):
        raise ParseError("threshold_ratio must be a number")
    if isinstance(v, (int, float)):
        return Fraction(str(v))
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            pass
    raise ParseError(f"threshold_ratio: cannot read {v!r} as a rational")


def model_to_dict(model: MaturityModel) -> dict[str, Any]:
    return {
        "name": model.name,
        "threshold_ratio": _ratio_to_json(model.threshold_ratio),
        "applicability_cutoff": model.applicability_cutoff,
        "strict_dgmm": model.strict_dgmm,
        "levels": [{"ordinal": lv.ordinal, "name": lv.name} for lv in model.levels],
        "dimensions": [{"id": d.id, "name": d.name} for d in model.dimensions],
        "activities": [
            {"aid": a.aid, "abbreviation": a.abbreviation, "full_name": a.full_name, "dimension_id": a.dimension_id}
            for a in model.activities
        ],
        "statements": [
            {"level": s.level, "aid": s.aid, "ordinal": s.ordinal, "text": s.text} for s in model.statements
        ],
    }


def dump_model(model: MaturityModel) -> str:
    """Canonical JSON text; stable bytes for equal models."""
    return json.dumps(model_to_dict(model), indent=2, ensure_ascii=False) + "\n"


def _records(doc: dict, key: str, fields: dict[str, type]) -> list[dict]:
    raw = doc.get(key)
    if not isinstance(raw, list):
        raise ParseError(f"'{key}' must be a list")
    out = []
    for i, rec in enumerate(raw):
        if not isinstance(rec, dict):
            raise ParseError(f"{key}[{i}]: expected an object")
        for fname, ftype in fields.items():
            if fname not in rec:
                raise ParseError(f"{key}[{i}]: missing '{fname}'")
            val = rec[fname]
            if not isinstance(val, ftype) or (ftype is int and isinstance(val, bool)):
                raise ParseError(f"{key}[{i}].{fname}: expected {ftype.__name__}, got {type(val).__name__}")
        out.append(rec)
    return out


def model_from_dict(doc: Any) -> MaturityModel:
    """Build a model from its JSON form. Structure only; no validation."""
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object")
    for key in ("name", "levels", "dimensions", "activities", "statements"):
        if key not in doc:
            raise ParseError(f"missing top-level key '{key}'")
    if not isinstance(doc["name"], str):
        raise ParseError("'name' must be a string")
    cutoff = doc.get("applicability_cutoff", 3)
    if not isinstance(cutoff, int) or isinstance(cutoff, bool):
        raise ParseError("'applicability_cutoff' must be an integer")
    strict = doc.get("strict_dgmm", False)
    if not isinstance(strict, bool):
        raise ParseError("'strict_dgmm' must be true or false")

    levels = tuple(Level(r["ordinal"], r["name"]) for r in _records(doc, "levels", {"ordinal": int, "name": str}))
    dims = tuple(Dimension(r["id"], r["name"]) for r in _records(doc, "dimensions", {"id": int, "name": str}))
    acts = tuple(
        Activity(r["aid"], r["abbreviation"], r["full_name"], r["dimension_id"])
        for r in _records(
            doc, "activities", {"aid": int, "abbreviation": str, "full_name": str, "dimension_id": int}
        )
    )
    stmts = tuple(
        Statement(r["level"], r["aid"], r["ordinal"], r["text"])
        for r in _records(doc, "statements", {"level": int, "aid": int, "ordinal": int, "text": str})
    )
    return MaturityModel(
        name=doc["name"],
        levels=levels,
        dimensions=dims,
        activities=acts,
        statements=stmts,
        threshold_ratio=_ratio_from_json(doc.get("threshold_ratio", 0.8)),
        applicability_cutoff=cutoff,
        strict_dgmm=strict,
    )


def load_model(source: str | Path | IO[str]) -> MaturityModel:
    """Read, build and validate a model document.

    Raises ParseError for unreadable/malformed JSON and ValidationError
    (carrying all violations) when the model breaks an invariant.
    """
    label = str(source) if isinstance(source, (str, Path)) else getattr(source, "name", "<stream>")
    try:
        if isinstance(source, (str, Path)):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = source.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"{label}: cannot read model: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{label}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    try:
        model = model_from_dict(doc)
    except ParseError as exc:
        raise ParseError(f"{label}: {exc}") from exc
    problems = validate_model(model)
    if problems:
        raise ValidationError(f"{label}: invalid model", problems)
    return model


@lru_cache(maxsize=1)
def builtin_dgmm() -> MaturityModel:
    """The bundled Digital Game Maturity Model (5 levels, 18 GDPAs)."""
    text = resources.files("dgmm").joinpath("data/dgmm.json").read_text(encoding="utf-8")
    model = model_from_dict(json.loads(text))
    problems = validate_model(model)
    if problems:  # pragma: no cover - shipped data is fixed
        raise ValidationError("bundled DGMM is corrupt", problems)
    return model


def builtin_dgmm_path() -> Path:
    return Path(str(resources.files("dgmm").joinpath("data/dgmm.json")))
