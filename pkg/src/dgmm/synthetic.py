"""Synthetic response panels that hit a chosen applicable-count profile.

Used for demos and fixtures when real campaign data is unavailable. Every
rating of an "applicable" statement is 3 or 4 and every other rating is 0..2,
so the same statements are applicable under both aggregation policies.
"""

from __future__ import annotations

import random
from typing import Sequence

from dgmm.catalog import MaturityModel
from dgmm.ingest import ResponseSet, build_response_set

HIGH = (3, 4)
LOW = (0, 1, 2)


def synthesize_responses(
    model: MaturityModel,
    applicable_counts: Sequence[int],
    n_respondents: int = 4,
    *,
    organization: str = "Synthetic",
    seed: int = 0,
    agreement: float = 0.8,
) -> ResponseSet:
    """Panel whose level b has exactly ``applicable_counts[b-1]`` applicable statements.

    Each statement gets a base rating; each respondent keeps it with
    probability ``agreement`` and otherwise picks another value from the same
    band. A profile shorter than the model declares a truncated campaign.
    """
    if not 1 <= len(applicable_counts) <= model.max_level:
        raise ValueError(f"profile must cover 1..{model.max_level} levels")
    rng = random.Random(seed)
    people = [f"r{i + 1}" for i in range(n_respondents)]
    ratings: dict[tuple[str, str], int] = {}
    for level, na in enumerate(applicable_counts, start=1):
        stmts = model.statements_at(level)
        if not 0 <= na <= len(stmts):
            raise ValueError(f"level {level}: cannot make {na} of {len(stmts)} statements applicable")
        chosen = {s.id for s in rng.sample(stmts, na)}
        for st in stmts:
            band = HIGH if st.id in chosen else LOW
            base = rng.choice(band)
            for r in people:
                ratings[(r, st.id)] = base if rng.random() < agreement else rng.choice(band)
    max_level = len(applicable_counts) if len(applicable_counts) < model.max_level else None
    return build_response_set(
        organization, model.name, ratings, model, respondents=people, max_level=max_level
    )
