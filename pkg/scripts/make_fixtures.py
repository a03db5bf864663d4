"""Regenerate the synthetic case-study fixtures under tests/fixtures/."""

from pathlib import Path

from dgmm.catalog import builtin_dgmm
from dgmm.ingest import dump_responses_csv, dump_responses_json
from dgmm.synthetic import synthesize_responses

ORG_A = (29, 42, 44, 24, 18)
ORG_B = (27, 43, 40, 34, 24)

out = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
model = builtin_dgmm()
a = synthesize_responses(model, ORG_A, 4, organization="Organization A", seed=11)
b = synthesize_responses(model, ORG_B, 6, organization="Organization B", seed=22)
(out / "org_a.json").write_text(dump_responses_json(a), encoding="utf-8")
(out / "org_b.csv").write_text(dump_responses_csv(b), encoding="utf-8")
