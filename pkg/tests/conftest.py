from __future__ import annotations

from pathlib import Path

import pytest

from dgmm.catalog import MaturityModel, builtin_dgmm
from dgmm.ingest import ResponseSet, build_response_set
from dgmm.synthetic import synthesize_responses

FIXTURES = Path(__file__).parent / "fixtures"

ORG_A_PROFILE = (29, 42, 44, 24, 18)
ORG_B_PROFILE = (27, 43, 40, 34, 24)


@pytest.fixture(scope="session")
def dgmm() -> MaturityModel:
    return builtin_dgmm()


def uniform(model: MaturityModel, rating: int, n: int = 1, levels=None, **kw) -> ResponseSet:
    levels = levels or range(1, model.max_level + 1)
    people = [f"r{i + 1}" for i in range(n)]
    ratings = {(r, s.id): rating for lv in levels for s in model.statements_at(lv) for r in people}
    return build_response_set("Org", model.name, ratings, model, respondents=people, **kw)


def with_ratings(rs: ResponseSet, model: MaturityModel, changes: dict) -> ResponseSet:
    ratings = dict(rs.ratings)
    ratings.update(changes)
    return build_response_set(
        rs.organization, rs.model_name, ratings, model,
        respondents=list(rs.respondents), max_level=rs.max_level, metadata=rs.metadata,
    )


@pytest.fixture(scope="session")
def org_a(dgmm) -> ResponseSet:
    return synthesize_responses(dgmm, ORG_A_PROFILE, 4, organization="Organization A", seed=11)


@pytest.fixture(scope="session")
def org_b(dgmm) -> ResponseSet:
    return synthesize_responses(dgmm, ORG_B_PROFILE, 6, organization="Organization B", seed=22)
