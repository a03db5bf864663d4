import io
import json
import random

import pytest

from dgmm.errors import ParseError, ValidationError
from dgmm.ingest import (
    build_response_set,
    dump_responses_csv,
    dump_responses_json,
    merge_response_sets,
    parse_responses,
)

from conftest import FIXTURES, uniform


def _csv(rows, meta="# organization: Acme\n# model_name: DGMM\n", header="respondent,statement_id,rating"):
    return io.StringIO(meta + header + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows))


def _full_rows(model, people=("r1", "r2", "r3", "r4"), rating=3):
    return [(p, s.id, rating) for p in people for s in model.statements]


def test_four_respondents_full_catalog(dgmm):
    rs = parse_responses(_csv(_full_rows(dgmm)), dgmm)
    assert len(rs) == 4 * len(dgmm.statements) == 920
    assert rs.respondents == ("r1", "r2", "r3", "r4")
    assert rs.organization == "Acme" and rs.model_name == "DGMM"


def test_rating_out_of_range(dgmm):
    rows = _full_rows(dgmm)
    rows[0] = ("r1", rows[0][1], 5)
    with pytest.raises(ValidationError) as exc:
        parse_responses(_csv(rows), dgmm)
    assert any("rating out of range" in v for v in exc.value.violations)


def test_missing_cell_is_listed(dgmm):
    rows = [r for r in _full_rows(dgmm) if (r[0], r[1]) != ("r2", "S.3.9.5")]
    with pytest.raises(ValidationError) as exc:
        parse_responses(_csv(rows), dgmm)
    assert any("(r2, S.3.9.5)" in v for v in exc.value.violations)
    assert "1 missing cell" in str(exc.value)


def test_unknown_statement(dgmm):
    rows = _full_rows(dgmm) + [("r1", "S.9.9.9", 3)]
    with pytest.raises(ValidationError) as exc:
        parse_responses(_csv(rows), dgmm)
    assert any("unknown statement id S.9.9.9" in v for v in exc.value.violations)


def test_duplicate_entry(dgmm):
    rows = _full_rows(dgmm)
    rows.append(rows[5])
    with pytest.raises(ValidationError) as exc:
        parse_responses(_csv(rows), dgmm)
    assert any("duplicate entry" in v for v in exc.value.violations)


@pytest.mark.parametrize("bad", ["three", "", "3.5"])
def test_malformed_rating_is_parse_error(dgmm, bad):
    rows = _full_rows(dgmm)
    rows[3] = ("r1", rows[3][1], bad)
    with pytest.raises(ParseError) as exc:
        parse_responses(_csv(rows), dgmm)
    assert "line" in str(exc.value)


def test_blank_is_not_coerced_to_zero(dgmm):
    rows = _full_rows(dgmm)
    rows[0] = ("r1", rows[0][1], "")
    with pytest.raises(ParseError):
        parse_responses(_csv(rows), dgmm)


def test_bad_header(dgmm):
    with pytest.raises(ParseError):
        parse_responses(_csv([], header="who,what"), dgmm)


def test_percent_column(dgmm):
    rows = [(p, sid, "", 85) for p, sid, _ in _full_rows(dgmm, ("a", "b"))]
    rows[0] = ("a", rows[0][1], "", "NA")
    rows[1] = ("a", rows[1][1], "", 70)
    rs = parse_responses(_csv(rows, header="respondent,statement_id,rating,percent"), dgmm)
    assert rs.rating("a", rows[0][1]) == 0
    assert rs.rating("a", rows[1][1]) == 3
    assert rs.rating("b", rows[0][1]) == 4


def test_percent_and_rating_both_given(dgmm):
    rows = [(p, sid, 3, 85) for p, sid, _ in _full_rows(dgmm, ("a",))]
    with pytest.raises((ParseError, ValidationError)):
        parse_responses(_csv(rows, header="respondent,statement_id,rating,percent"), dgmm)


def test_max_level_truncation(dgmm):
    rows = [(p, s.id, 4) for p in ("a", "b") for lv in (1, 2) for s in dgmm.statements_at(lv)]
    rs = parse_responses(_csv(rows, meta="# model_name: DGMM\n# max_level: 2\n"), dgmm)
    assert rs.max_level == 2
    assert len(rs) == 2 * (len(dgmm.statements_at(1)) + len(dgmm.statements_at(2)))
    with pytest.raises(ValidationError):
        parse_responses(_csv(rows, meta="# model_name: DGMM\n"), dgmm)


def test_organization_defaults_to_file_stem(dgmm, tmp_path):
    path = tmp_path / "studio_x.csv"
    path.write_text("# model_name: DGMM\nrespondent,statement_id,rating\n" +
                    "".join(f"{p},{sid},{v}\n" for p, sid, v in _full_rows(dgmm, ("a",))), encoding="utf-8")
    assert parse_responses(path, dgmm).organization == "studio_x"


def test_shuffled_input_gives_equal_set(dgmm):
    rows = [(p, s.id, random.Random(i).randint(0, 4)) for i, (p, s) in
            enumerate((p, s) for p in ("a", "b", "c") for s in dgmm.statements)]
    shuffled = rows[:]
    random.Random(5).shuffle(shuffled)
    a = parse_responses(_csv(rows), dgmm)
    b = parse_responses(_csv(shuffled), dgmm)
    assert a == b and list(a.ratings) == list(b.ratings)


def test_csv_and_json_round_trip(org_a, org_b, dgmm):
    for rs in (org_a, org_b):
        assert parse_responses(io.StringIO(dump_responses_json(rs)), dgmm, fmt="json") == rs
        assert parse_responses(io.StringIO(dump_responses_csv(rs)), dgmm, fmt="csv") == rs


def test_fixture_files_load(dgmm, org_a, org_b):
    assert parse_responses(FIXTURES / "org_a.json", dgmm) == org_a
    assert parse_responses(FIXTURES / "org_b.csv", dgmm) == org_b


def test_json_percent_objects(dgmm):
    doc = {"organization": "J", "model_name": "DGMM",
           "responses": {"x": {s.id: {"percent": 50} for s in dgmm.statements}}}
    doc["responses"]["x"]["S.1.1.1"] = {"percent": None}
    rs = parse_responses(io.StringIO(json.dumps(doc)), dgmm)
    assert rs.rating("x", "S.1.1.1") == 0 and rs.rating("x", "S.1.1.2") == 2


@pytest.mark.parametrize("text", ["{", "[]", '{"model_name": "DGMM", "responses": 3}'])
def test_json_parse_errors(dgmm, text):
    with pytest.raises(ParseError):
        parse_responses(io.StringIO(text), dgmm, fmt="json")


def test_json_bool_rating_rejected(dgmm):
    doc = {"organization": "J", "model_name": "DGMM",
           "responses": {"x": {s.id: 3 for s in dgmm.statements}}}
    doc["responses"]["x"]["S.1.1.1"] = True
    with pytest.raises((ParseError, ValidationError)):
        parse_responses(io.StringIO(json.dumps(doc)), dgmm)


def _split(rs, dgmm, people):
    ratings = {k: v for k, v in rs.ratings.items() if k[0] in people}
    return build_response_set(rs.organization, rs.model_name, ratings, dgmm, respondents=list(people))


def test_merge(org_a, dgmm):
    left = _split(org_a, dgmm, ("r1", "r2"))
    right = _split(org_a, dgmm, ("r3", "r4"))
    assert merge_response_sets(left, right, dgmm) == org_a


def test_merge_collision(org_a, dgmm):
    left = _split(org_a, dgmm, ("r1", "r2"))
    with pytest.raises(ValidationError) as exc:
        merge_response_sets(left, _split(org_a, dgmm, ("r2", "r3")), dgmm)
    assert "respondent collision" in str(exc.value)


def test_model_mismatch(dgmm):
    with pytest.raises(ValidationError) as exc:
        build_response_set("O", "Other", {}, dgmm, respondents=["a"])
    assert "model mismatch" in str(exc.value)


def test_no_respondents(dgmm):
    with pytest.raises(ValidationError):
        build_response_set("O", "DGMM", {}, dgmm, respondents=[])


def test_uniform_helper(dgmm):
    rs = uniform(dgmm, 2, n=3)
    assert len(rs) == 3 * 230 and set(rs.ratings.values()) == {2}
