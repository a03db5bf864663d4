"""Inter-rater agreement: Kendall's W (tie-corrected), Fleiss' kappa with its
large-sample Z, pairwise Cohen's kappa, and qualitative bands.

Coefficients are computed exactly with ``Fraction``; only Z and p-values,
which need a square root or a distribution tail, are floats.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple, Sequence

from scipy import stats

from dgmm.errors import ComputationError, DegenerateDataError

if TYPE_CHECKING:
    from dgmm.catalog import MaturityModel
    from dgmm.ingest import ResponseSet

CATEGORIES = (0, 1, 2, 3, 4)

POOR, MODERATE, SUBSTANTIAL, EXCELLENT = "poor", "moderate", "substantial", "excellent"
BAND_CUTS = ((Fraction("0.44"), POOR), (Fraction("0.62"), MODERATE), (Fraction("0.78"), SUBSTANTIAL))


@dataclass(frozen=True)
class RatingMatrix:
    """Complete ratings, one row per rater, one column per item."""

    raters: tuple[str, ...]
    items: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        m, n = len(self.raters), len(self.items)
        if m < 2 or n < 2:
            raise ValueError(f"need at least 2 raters and 2 items, got {m} x {n}")
        if len(self.cells) != m or any(len(row) != n for row in self.cells):
            raise ValueError("cells must be a complete raters x items grid")
        if any(v not in CATEGORIES for row in self.cells for v in row):
            raise ValueError("ratings must lie in 0..4")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> RatingMatrix:
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        n = len(rows[0]) if rows else 0
        return cls(
            tuple(f"r{i + 1}" for i in range(len(rows))),
            tuple(f"i{j + 1}" for j in range(n)),
            rows,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.raters), len(self.items)

    def columns(self) -> list[tuple[int, ...]]:
        return list(zip(*self.cells))


class KendallResult(NamedTuple):
    w: Fraction
    chi_square: Fraction
    df: int


class FleissResult(NamedTuple):
    kappa: Fraction
    z: float | None
    degenerate: bool = False


def _doubled_midranks(values: Sequence[int], counts: Counter | None = None) -> list[int]:
    # twice the midrank, so tied ranks stay integral
    counts = counts or Counter(values)
    below = 0
    start: dict[int, int] = {}
    for v in sorted(counts):
        start[v] = 2 * below + counts[v] + 1
        below += counts[v]
    return [start[v] for v in values]


def midranks(values: Sequence[int]) -> list[Fraction]:
    """Ranks 1..n with tied values sharing the mean of their positions."""
    return [Fraction(r, 2) for r in _doubled_midranks(values)]


def kendalls_w(matrix: RatingMatrix) -> KendallResult:
    """Coefficient of concordance with the standard tie correction.

    W = 12 S / (m^2 (n^3 - n) - m sum T), with S the squared deviation of the
    item rank sums from m(n+1)/2 and T = sum(t^3 - t) over each rater's tie
    groups. Raises DegenerateDataError when every rater is fully tied.
    """
    m, n = matrix.shape
    tallies = [Counter(row) for row in matrix.cells]
    rank_sums = [sum(col) for col in zip(*map(_doubled_midranks, matrix.cells, tallies))]
    mean = m * (n + 1)
    s4 = sum((r - mean) ** 2 for r in rank_sums)  # 4 S
    ties = sum(t**3 - t for c in tallies for t in c.values())
    denom = m * m * (n**3 - n) - m * ties
    if denom == 0:
        raise DegenerateDataError("no variance: every rater gave a single rating to all items")
    w = Fraction(3 * s4, denom)
    return KendallResult(w, m * (n - 1) * w, n - 1)


def fleiss_kappa(matrix: RatingMatrix) -> FleissResult:
    """Fleiss' kappa over categories 0..4 and Z = kappa / SE under kappa = 0.

    When every rating falls in one category the chance term is 1 and kappa
    is undefined; the result is reported as kappa = 1, z = None, flagged.
    """
    m, n = matrix.shape
    counts = [Counter(col) for col in matrix.columns()]
    p_bar = sum(
        Fraction(sum(c * (c - 1) for c in cnt.values()), m * (m - 1)) for cnt in counts
    ) / n
    p = [Fraction(sum(cnt[j] for cnt in counts), n * m) for j in CATEGORIES]
    p_e = sum(pj * pj for pj in p)
    if p_e == 1:
        return FleissResult(Fraction(1), None, True)
    kappa = (p_bar - p_e) / (1 - p_e)

    pq = sum(pj * (1 - pj) for pj in p)
    spread = pq * pq - sum(pj * (1 - pj) * ((1 - pj) - pj) for pj in p)
    var = Fraction(2, n * m * (m - 1)) * spread / (pq * pq)
    z = float(kappa) / math.sqrt(var) if var > 0 else None
    return FleissResult(kappa, z, False)


def _cohen(a: Sequence[int], b: Sequence[int]) -> tuple[Fraction, bool]:
    if len(a) != len(b) or not a:
        raise ValueError("rating vectors must be non-empty and of equal length")
    n = len(a)
    p_o = Fraction(sum(1 for x, y in zip(a, b) if x == y), n)
    ca, cb = Counter(a), Counter(b)
    p_e = sum(Fraction(ca[k] * cb[k], n * n) for k in set(ca) | set(cb))
    if p_e == 1:
        return Fraction(1), True
    return (p_o - p_e) / (1 - p_e), False


def cohens_kappa(rater_a: Sequence[int], rater_b: Sequence[int]) -> Fraction:
    """Two-rater kappa. Two identical constant vectors give 1 by convention."""
    return _cohen(rater_a, rater_b)[0]


def classify_agreement(kappa: Fraction | float) -> str:
    k = Fraction(repr(kappa)) if isinstance(kappa, float) else Fraction(kappa)
    for cut, band in BAND_CUTS:
        if k < cut:
            return band
    return EXCELLENT


def significance_stars(p: float | None) -> str:
    """Footnote convention of the case-study tables: '*' p<0.01, '**' p<0.05."""
    if p is None:
        return ""
    if p < 0.01:
        return "*"
    if p < 0.05:
        return "**"
    return ""


def chi_square_p(chi_square: Fraction | float, df: int) -> float:
    return float(stats.chi2.sf(float(chi_square), df))


def normal_two_sided_p(z: float) -> float:
    return math.erfc(abs(z) / math.sqrt(2))


@dataclass(frozen=True)
class PairwiseKappa:
    rater_a: str
    rater_b: str
    kappa: Fraction
    degenerate: bool = False


@dataclass(frozen=True)
class AgreementReport:
    level: int
    n_raters: int
    n_items: int
    kendall_w: Fraction | None
    chi_square: Fraction | None
    chi_square_df: int
    kendall_p: float | None
    fleiss_kappa: Fraction
    fleiss_z: float | None
    fleiss_p: float | None
    pairwise_cohen: tuple[PairwiseKappa, ...]
    band: str
    flags: tuple[str, ...] = ()


def agreement_for_matrix(level: int, matrix: RatingMatrix) -> AgreementReport:
    flags = []
    m, n = matrix.shape
    try:
        kw = kendalls_w(matrix)
        w, chi, kp = kw.w, kw.chi_square, chi_square_p(kw.chi_square, kw.df)
    except DegenerateDataError as exc:
        w = chi = kp = None
        flags.append(f"kendall: {exc}")
    fk = fleiss_kappa(matrix)
    if fk.degenerate:
        flags.append("fleiss: degenerate, uniform ratings (kappa reported as 1)")
    fp = normal_two_sided_p(fk.z) if fk.z is not None else None

    pairs = []
    for (i, ra), (j, rb) in itertools.combinations(enumerate(matrix.raters), 2):
        k, degenerate = _cohen(matrix.cells[i], matrix.cells[j])
        pairs.append(PairwiseKappa(ra, rb, k, degenerate))
        if degenerate:
            flags.append(f"cohen: degenerate pair ({ra}, {rb}), kappa reported as 1")
    return AgreementReport(
        level=level,
        n_raters=m,
        n_items=n,
        kendall_w=w,
        chi_square=chi,
        chi_square_df=n - 1,
        kendall_p=kp,
        fleiss_kappa=fk.kappa,
        fleiss_z=fk.z,
        fleiss_p=fp,
        pairwise_cohen=tuple(pairs),
        band=classify_agreement(fk.kappa),
        flags=tuple(flags),
    )


def level_matrix(level: int, responses: ResponseSet, model: MaturityModel) -> RatingMatrix:
    sids = tuple(s.id for s in model.statements_at(level))
    missing = [(r, s) for r in responses.respondents for s in sids if (r, s) not in responses.ratings]
    if missing:
        raise ComputationError(f"level {level}: incomplete ratings, e.g. {missing[0]}")
    cells = tuple(tuple(responses.ratings[(r, s)] for s in sids) for r in responses.respondents)
    return RatingMatrix(tuple(responses.respondents), sids, cells)


def agreement_by_level(responses: ResponseSet, model: MaturityModel) -> list[AgreementReport]:
    """One report per assessed level; items are that level's statements."""
    if len(responses.respondents) < 2:
        raise ComputationError(
            f"agreement undefined: need at least 2 respondents, found {len(responses.respondents)}"
        )
    bound = responses.max_level or model.max_level
    reports = []
    for level in range(1, bound + 1):
        if len(model.statements_at(level)) < 2:
            raise ComputationError(f"agreement undefined at level {level}: fewer than 2 statements")
        reports.append(agreement_for_matrix(level, level_matrix(level, responses, model)))
    return reports
