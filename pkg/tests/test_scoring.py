import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dgmm.ingest import build_response_set
from dgmm.scoring import (
    MEAN,
    MEDIAN_LOW,
    POLICIES,
    aggregate_ratings,
    count_applicable,
    determine_maturity,
    evaluate_level,
    maturity_from_counts,
    passing_threshold,
    percentage_to_rating,
)
from dgmm.errors import ValidationError
from dgmm.synthetic import synthesize_responses

from conftest import ORG_A_PROFILE, ORG_B_PROFILE, uniform, with_ratings

PUBLISHED_PT = (25, 41, 43, 43, 42)


@pytest.mark.parametrize("extent,rating", [
    (85, 4), (80, 4), (100, 4), (79.9, 3), (70, 3), (66.7, 3), (66.6, 2),
    (66.65, 2), (33.3, 2), (33.29, 1), (0, 1), (None, 0),
])
def test_percentage_bands(extent, rating):
    assert percentage_to_rating(extent) == rating


@pytest.mark.parametrize("bad", [-0.1, 100.1, float("nan")])
def test_percentage_out_of_domain(bad):
    with pytest.raises(ValueError):
        percentage_to_rating(bad)


def test_percentage_rejects_non_numbers():
    with pytest.raises(TypeError):
        percentage_to_rating("80")


@pytest.mark.parametrize("ratings,policy,expected", [
    ([3, 4, 2], MEDIAN_LOW, 3),
    ([2, 3], MEDIAN_LOW, 2),
    ([3, 4, 2], MEAN, 3),
    ([2, 3], MEAN, Fraction(5, 2)),
    ([0, 0, 4, 4], MEDIAN_LOW, 0),
    ([1, 2, 2], MEAN, Fraction(5, 3)),
])
def test_aggregation(ratings, policy, expected):
    assert aggregate_ratings(ratings, policy) == expected


def test_aggregation_errors():
    with pytest.raises(ValueError):
        aggregate_ratings([])
    with pytest.raises(ValueError):
        aggregate_ratings([1], "mode")


@pytest.mark.parametrize("total,pt", [(31, 25), (51, 41), (54, 43), (53, 42), (10, 8), (0, 0), (47, 38), (43, 34)])
def test_passing_threshold(total, pt):
    assert passing_threshold(total, Fraction(4, 5)) == pt


def test_passing_threshold_rounds_half_up():
    assert passing_threshold(5, Fraction(1, 2)) == 3
    assert passing_threshold(7, Fraction(1, 2)) == 4
    assert passing_threshold(5, 0.5) == 3


def test_count_applicable(dgmm):
    level1 = [s.id for s in dgmm.statements_at(1)]
    assert count_applicable(1, {sid: Fraction(4) for sid in level1}, dgmm) == 31
    assert count_applicable(1, {sid: Fraction(2) for sid in level1}, dgmm) == 0
    with pytest.raises(ValidationError):
        count_applicable(1, {level1[0]: Fraction(3)}, dgmm)


def test_cutoff_is_inclusive(dgmm):
    rs = uniform(dgmm, 3, n=2)
    assert evaluate_level(1, rs, dgmm).applicable_count == 31


def test_evaluate_level_extremes(dgmm):
    good = evaluate_level(1, uniform(dgmm, 4), dgmm)
    assert (good.applicable_count, good.passing_threshold, good.passed) == (31, 25, True)
    bad = evaluate_level(1, uniform(dgmm, 0), dgmm)
    assert (bad.applicable_count, bad.passing_threshold, bad.passed) == (0, 25, False)


def test_bundled_totals_and_thresholds(dgmm):
    result = determine_maturity(uniform(dgmm, 4), dgmm)
    assert [ls.total_statements for ls in result.level_scores] == [31, 48, 54, 54, 43]
    assert [ls.passing_threshold for ls in result.level_scores] == [25, 38, 43, 43, 34]


def test_org_b_level_three(org_b, dgmm):
    ls = evaluate_level(3, org_b, dgmm)
    assert (ls.applicable_count, ls.passing_threshold, ls.passed) == (40, 43, False)


@pytest.mark.parametrize("fixture,profile,gml", [("org_a", ORG_A_PROFILE, 3), ("org_b", ORG_B_PROFILE, 2)])
def test_case_studies(request, dgmm, fixture, profile, gml):
    rs = request.getfixturevalue(fixture)
    for policy in POLICIES:
        result = determine_maturity(rs, dgmm, policy)
        assert [ls.applicable_count for ls in result.level_scores] == list(profile)
        assert result.gml == gml and result.warnings == ()
    assert dgmm.level_name(gml) == {3: "Consistent", 2: "Opportunistic"}[gml]


def test_case_studies_against_published_thresholds():
    assert maturity_from_counts(ORG_A_PROFILE, PUBLISHED_PT)[0] == 3
    assert maturity_from_counts(ORG_B_PROFILE, PUBLISHED_PT)[0] == 2


def test_non_contiguous_profile():
    gml, warnings = maturity_from_counts([20, 45, 50, 50, 50], PUBLISHED_PT)
    assert gml == 5
    assert len(warnings) == 1 and warnings[0].startswith("non-contiguous pass profile")


def test_all_zero_ratings(dgmm):
    result = determine_maturity(uniform(dgmm, 0), dgmm)
    assert result.gml == 0 and "no level passed" in result.warnings
    assert dgmm.level_name(0) == "Below Ad-Hoc"


def test_truncated_determination(dgmm):
    rs = uniform(dgmm, 4, n=2, levels=(1, 2), max_level=2)
    result = determine_maturity(rs, dgmm)
    assert result.gml == 2 and result.determination_bound == 2
    assert "determination truncated at level 2" in result.warnings
    with pytest.raises(KeyError):
        result.level_score(3)


def test_statement_scores_retained(org_a, dgmm):
    ls = evaluate_level(2, org_a, dgmm)
    assert [s.statement_id for s in ls.statement_scores] == [s.id for s in dgmm.statements_at(2)]
    assert all(min(s.ratings) <= s.aggregate <= max(s.ratings) for s in ls.statement_scores)
    assert sum(s.applicable for s in ls.statement_scores) == ls.applicable_count


# --- properties -------------------------------------------------------------

ratings_lists = st.lists(st.integers(0, 4), min_size=1, max_size=9)


@given(ratings_lists, st.sampled_from(POLICIES))
def test_aggregate_in_range(ratings, policy):
    agg = aggregate_ratings(ratings, policy)
    assert min(ratings) <= agg <= max(ratings)


@given(st.integers(0, 4), st.sampled_from(POLICIES))
def test_single_respondent_identity(r, policy):
    assert aggregate_ratings([r], policy) == r


@given(ratings_lists, st.sampled_from(POLICIES), st.randoms(use_true_random=False))
def test_aggregate_permutation_invariant(ratings, policy, rnd):
    shuffled = ratings[:]
    rnd.shuffle(shuffled)
    assert aggregate_ratings(shuffled, policy) == aggregate_ratings(ratings, policy)


@given(ratings_lists, st.data(), st.sampled_from(POLICIES))
def test_aggregate_monotone(ratings, data, policy):
    i = data.draw(st.integers(0, len(ratings) - 1))
    if ratings[i] == 4:
        return
    raised = ratings[:]
    raised[i] += data.draw(st.integers(1, 4 - ratings[i]))
    assert aggregate_ratings(raised, policy) >= aggregate_ratings(ratings, policy)


@given(st.floats(0, 100), st.floats(0, 100))
def test_percentage_monotone(a, b):
    lo, hi = sorted((a, b))
    assert percentage_to_rating(lo) <= percentage_to_rating(hi)


@given(st.lists(st.integers(0, 60), min_size=5, max_size=5))
def test_gml_formula(nas):
    gml, _ = maturity_from_counts(nas, PUBLISHED_PT)
    passed = [b + 1 for b in range(5) if nas[b] >= PUBLISHED_PT[b]]
    assert gml == (max(passed) if passed else 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(POLICIES))
def test_full_set_monotone(seed, policy):
    from conftest import ORG_A_PROFILE
    from dgmm.catalog import builtin_dgmm

    model = builtin_dgmm()
    rs = synthesize_responses(model, ORG_A_PROFILE, 3, seed=seed)
    rnd = random.Random(seed)
    key = rnd.choice([k for k, v in rs.ratings.items() if v < 4])
    up = with_ratings(rs, model, {key: rnd.randint(rs.ratings[key] + 1, 4)})
    before, after = determine_maturity(rs, model, policy), determine_maturity(up, model, policy)
    assert after.gml >= before.gml
    for b, a in zip(before.level_scores, after.level_scores):
        assert a.applicable_count >= b.applicable_count


def test_respondent_relabel_invariance(org_b, dgmm):
    rename = dict(zip(org_b.respondents, reversed(org_b.respondents)))
    relabelled = build_response_set(
        org_b.organization, org_b.model_name,
        {(rename[r], sid): v for (r, sid), v in org_b.ratings.items()}, dgmm,
        respondents=list(rename.values()),
    )
    for policy in POLICIES:
        a, b = determine_maturity(org_b, dgmm, policy), determine_maturity(relabelled, dgmm, policy)
        assert a.gml == b.gml
        assert [ls.applicable_count for ls in a.level_scores] == [ls.applicable_count for ls in b.level_scores]
        for la, lb in zip(a.level_scores, b.level_scores):
            assert [s.aggregate for s in la.statement_scores] == [s.aggregate for s in lb.statement_scores]
