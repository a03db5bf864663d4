"""Response-file parsing and validation.

Two encodings are accepted:

* long-form CSV, header ``respondent,statement_id,rating[,percent]``, one row
  per respondent x statement. Leading ``# key: value`` lines carry file
  metadata (``organization``, ``model_name``, ``max_level``, anything else is
  kept in ``metadata``).
* JSON: ``{"organization", "model_name", "max_level"?, "metadata"?,
  "responses": {respondent: {statement_id: rating | {"percent": x}}}}``.

Percent values are converted with :func:`dgmm.scoring.percentage_to_rating`;
``NA`` in the percent column is the explicit not-applicable mark (rating 0).
Blank cells are never read as 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Mapping

from dgmm.catalog import MaturityModel
from dgmm.errors import ParseError, ValidationError
from dgmm.scoring import percentage_to_rating

CSV_HEADER = ("respondent", "statement_id", "rating")
NA_MARKS = {"na", "n/a", "not applicable"}


@dataclass(frozen=True)
class ResponseSet:
    organization: str
    model_name: str
    respondents: tuple[str, ...]
    ratings: Mapping[tuple[str, str], int]
    metadata: Mapping[str, str] = field(default_factory=dict)
    max_level: int | None = None

    def __len__(self) -> int:
        return len(self.ratings)

    def rating(self, respondent: str, sid: str) -> int:
        return self.ratings[(respondent, sid)]

    def ratings_for(self, sid: str) -> tuple[int, ...]:
        """Every respondent's rating of one statement, in respondent order."""
        return tuple(self.ratings[(r, sid)] for r in self.respondents if (r, sid) in self.ratings)

    def statement_ids(self) -> set[str]:
        return {sid for _, sid in self.ratings}


def build_response_set(
    organization: str,
    model_name: str,
    ratings: Mapping[tuple[str, str], int],
    model: MaturityModel,
    *,
    respondents: list[str] | None = None,
    max_level: int | None = None,
    metadata: Mapping[str, str] | None = None,
) -> ResponseSet:
    """Validate ratings against the model and freeze them into a ResponseSet.

    Respondents are stored sorted so that input order never leaks into
    results. Raises ValidationError listing every problem found.
    """
    problems: list[str] = []
    if model_name != model.name:
        problems.append(f"model mismatch: responses are for '{model_name}', model is '{model.name}'")
    people = sorted(set(respondents if respondents is not None else (r for r, _ in ratings)))
    if not people:
        problems.append("no respondents")
    if max_level is not None and not (1 <= max_level <= model.max_level):
        problems.append(f"max_level {max_level} outside 1..{model.max_level}")
        max_level = None

    bound = max_level or model.max_level
    for (resp, sid), value in ratings.items():
        if not model.has_statement(sid):
            problems.append(f"unknown statement id {sid} (respondent {resp})")
        elif model.statement(sid).level > bound:
            problems.append(f"statement {sid} is above declared max_level {bound} (respondent {resp})")
        if isinstance(value, bool) or not isinstance(value, int) or not (0 <= value <= 4):
            problems.append(f"rating out of range: {value!r} for ({resp}, {sid})")

    missing = [
        f"({resp}, {st.id})"
        for lv in range(1, bound + 1)
        for st in model.statements_at(lv)
        for resp in people
        if (resp, st.id) not in ratings
    ]
    if missing:
        problems.append(f"coverage gap: {len(missing)} missing cell(s): " + ", ".join(missing))
    if problems:
        raise ValidationError("invalid responses", problems)
    order = {st.id: i for i, st in enumerate(model.statements)}
    return ResponseSet(
        organization=organization,
        model_name=model_name,
        respondents=tuple(people),
        ratings=dict(sorted(ratings.items(), key=lambda kv: (kv[0][0], order[kv[0][1]]))),
        metadata=dict(metadata or {}),
        max_level=max_level,
    )


def _read_source(source: str | Path | IO[str]) -> tuple[str, str]:
    if isinstance(source, (str, Path)):
        try:
            return Path(source).read_text(encoding="utf-8-sig"), str(source)
        except (OSError, UnicodeDecodeError) as exc:
            raise ParseError(f"{source}: cannot read responses: {exc}") from exc
    return source.read(), getattr(source, "name", "<stream>")


def parse_responses(
    source: str | Path | IO[str],
    model: MaturityModel,
    *,
    fmt: str | None = None,
    organization: str | None = None,
) -> ResponseSet:
    """Parse a CSV or JSON response document against ``model``.

    ``fmt`` is ``"csv"`` or ``"json"``; when omitted it is taken from the file
    suffix, then from the first non-blank character.
    """
    text, label = _read_source(source)
    if fmt is None:
        suffix = Path(label).suffix.lower()
        if suffix in (".csv", ".json"):
            fmt = suffix[1:]
        else:
            fmt = "json" if text.lstrip().startswith("{") else "csv"
    if fmt == "json":
        return _parse_json(text, label, model, organization)
    if fmt == "csv":
        default_org = organization or (Path(label).stem if label != "<stream>" else "")
        return _parse_csv(text, label, model, default_org)
    raise ValueError(f"unknown response format {fmt!r}")


def _parse_percent(raw: str) -> int:
    if raw.strip().lower() in NA_MARKS:
        return percentage_to_rating(None)
    value = float(raw)
    if math.isnan(value):
        raise ValueError("percent is NaN")
    return percentage_to_rating(value)


def _parse_csv(text: str, label: str, model: MaturityModel, default_org: str) -> ResponseSet:
    lines = text.splitlines(keepends=True)
    meta: dict[str, str] = {}
    start = 0
    while start < len(lines) and (lines[start].startswith("#") or not lines[start].strip()):
        line = lines[start].lstrip("#").strip()
        if line:
            if ":" not in line:
                raise ParseError(f"{label}:{start + 1}: metadata line must be '# key: value'")
            key, _, value = line.partition(":")
            meta[key.strip()] = value.strip()
        start += 1

    reader = csv.reader(io.StringIO("".join(lines[start:])))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{label}: empty response file") from None
    header = [h.strip() for h in header]
    if tuple(header[:3]) != CSV_HEADER or header[3:] not in ([], ["percent"]):
        raise ParseError(
            f"{label}:{start + 1}: header must be 'respondent,statement_id,rating[,percent]', got {','.join(header)!r}"
        )
    has_percent = len(header) == 4

    parse_errors: list[str] = []
    problems: list[str] = []
    ratings: dict[tuple[str, str], int] = {}
    for row in reader:
        lineno = start + reader.line_num
        if not any(c.strip() for c in row):
            continue
        if len(row) != len(header):
            parse_errors.append(f"line {lineno}: expected {len(header)} columns, found {len(row)}")
            continue
        resp, sid, rating_raw = (c.strip() for c in row[:3])
        percent_raw = row[3].strip() if has_percent else ""
        if not resp or not sid:
            parse_errors.append(f"line {lineno}: respondent and statement_id are required")
            continue
        if bool(rating_raw) == bool(percent_raw):
            what = "both rating and percent given" if rating_raw else "no rating or percent given"
            parse_errors.append(f"line {lineno}: {what} for ({resp}, {sid})")
            continue
        try:
            value = int(rating_raw) if rating_raw else _parse_percent(percent_raw)
        except ValueError as exc:
            col = "rating" if rating_raw else "percent"
            raw = rating_raw or percent_raw
            kind = "rating out of range" if "outside" in str(exc) else f"malformed {col}"
            target = problems if "outside" in str(exc) else parse_errors
            target.append(f"line {lineno}: {kind}: {raw!r}")
            continue
        if not (0 <= value <= 4):
            problems.append(f"line {lineno}: rating out of range: {value} for ({resp}, {sid})")
            continue
        if (resp, sid) in ratings:
            problems.append(f"line {lineno}: duplicate entry for ({resp}, {sid})")
            continue
        ratings[(resp, sid)] = value

    if parse_errors:
        raise ParseError(f"{label}: malformed responses: " + "; ".join(parse_errors))
    organization = meta.pop("organization", default_org)
    model_name = meta.pop("model_name", model.name)
    max_level = meta.pop("max_level", None)
    if max_level is not None:
        try:
            max_level = int(max_level)
        except ValueError:
            raise ParseError(f"{label}: max_level must be an integer, got {max_level!r}") from None
    return _finish(label, problems, organization, model_name, ratings, model, max_level, meta)


def _parse_json(text: str, label: str, model: MaturityModel, organization: str | None) -> ResponseSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{label}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{label}: response document must be a JSON object")
    responses = doc.get("responses")
    if not isinstance(responses, dict):
        raise ParseError(f"{label}: 'responses' must be an object keyed by respondent id")
    max_level = doc.get("max_level")
    if max_level is not None and (not isinstance(max_level, int) or isinstance(max_level, bool)):
        raise ParseError(f"{label}: max_level must be an integer")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise ParseError(f"{label}: 'metadata' must be an object")

    parse_errors: list[str] = []
    problems: list[str] = []
    ratings: dict[tuple[str, str], int] = {}
    for resp, answers in responses.items():
        if not isinstance(answers, dict):
            parse_errors.append(f"responses[{resp!r}]: expected an object of statement ratings")
            continue
        for sid, value in answers.items():
            where = f"responses[{resp!r}][{sid!r}]"
            if isinstance(value, dict) and set(value) == {"percent"}:
                pct = value["percent"]
                try:
                    value = _parse_percent(pct) if isinstance(pct, str) else percentage_to_rating(pct)
                except ValueError as exc:
                    problems.append(f"{where}: rating out of range: {exc}")
                    continue
                except TypeError:
                    parse_errors.append(f"{where}: malformed percent {pct!r}")
                    continue
            if isinstance(value, bool) or not isinstance(value, int):
                parse_errors.append(f"{where}: rating must be an integer 0..4, got {value!r}")
                continue
            if not (0 <= value <= 4):
                problems.append(f"{where}: rating out of range: {value}")
                continue
            ratings[(str(resp), str(sid))] = value
    if parse_errors:
        raise ParseError(f"{label}: malformed responses: " + "; ".join(parse_errors))
    org = organization or doc.get("organization") or ""
    model_name = doc.get("model_name", model.name)
    resp_ids = [str(r) for r in responses]
    return _finish(
        label, problems, str(org), str(model_name), ratings, model, max_level,
        {str(k): str(v) for k, v in meta.items()}, resp_ids,
    )


def _finish(label, problems, organization, model_name, ratings, model, max_level, meta, respondents=None):
    try:
        rs = build_response_set(
            organization, model_name, ratings, model,
            respondents=respondents, max_level=max_level, metadata=meta,
        )
    except ValidationError as exc:
        raise ValidationError(f"{label}: invalid responses", problems + exc.violations) from None
    if problems:
        raise ValidationError(f"{label}: invalid responses", problems)
    return rs


def merge_response_sets(a: ResponseSet, b: ResponseSet, model: MaturityModel) -> ResponseSet:
    """Disjoint union of two panels from the same organization and model."""
    if a.model_name != b.model_name:
        raise ValidationError("model mismatch", [f"'{a.model_name}' vs '{b.model_name}'"])
    if a.organization != b.organization:
        raise ValidationError("organization mismatch", [f"'{a.organization}' vs '{b.organization}'"])
    if a.max_level != b.max_level:
        raise ValidationError("max_level mismatch", [f"{a.max_level} vs {b.max_level}"])
    clash = sorted(set(a.respondents) & set(b.respondents))
    if clash:
        raise ValidationError("respondent collision", clash)
    return build_response_set(
        a.organization,
        a.model_name,
        {**a.ratings, **b.ratings},
        model,
        respondents=list(a.respondents) + list(b.respondents),
        max_level=a.max_level,
        metadata={**b.metadata, **a.metadata},
    )


def responses_to_dict(rs: ResponseSet) -> dict[str, Any]:
    doc: dict[str, Any] = {"organization": rs.organization, "model_name": rs.model_name}
    if rs.max_level is not None:
        doc["max_level"] = rs.max_level
    if rs.metadata:
        doc["metadata"] = dict(sorted(rs.metadata.items()))
    doc["responses"] = {
        r: {sid: v for (rr, sid), v in rs.ratings.items() if rr == r} for r in rs.respondents
    }
    return doc


def dump_responses_json(rs: ResponseSet) -> str:
    return json.dumps(responses_to_dict(rs), indent=2, ensure_ascii=False) + "\n"


def dump_responses_csv(rs: ResponseSet) -> str:
    buf = io.StringIO()
    buf.write(f"# organization: {rs.organization}\n# model_name: {rs.model_name}\n")
    if rs.max_level is not None:
        buf.write(f"# max_level: {rs.max_level}\n")
    for k, v in sorted(rs.metadata.items()):
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for (resp, sid), value in rs.ratings.items():
        w.writerow((resp, sid, value))
    return buf.getvalue()
