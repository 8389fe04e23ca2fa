"""Reference data for the three worked signatures.

Difference products are stored as lists of pairs (i, j) meaning the factor
(x_i - x_j), 1-based.  Pure partition functions omit the common prefactor
prod (x_j - x_i)^(-s_i s_j / 3), which cancels in every ratio.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import SparsePolynomial

Pair = tuple[int, int]


@dataclass(frozen=True)
class FactoredRatio:
    """coefficient * prod numerator / prod denominator, each factor (x_i - x_j)."""

    numerator: tuple[Pair, ...]
    denominator: tuple[Pair, ...] = ()
    coefficient: int = 1

    def evaluate(self, x: Sequence[Fraction | int]) -> Fraction:
        value = Fraction(self.coefficient)
        for i, j in self.numerator:
            value *= Fraction(x[i - 1]) - Fraction(x[j - 1])
        for i, j in self.denominator:
            value /= Fraction(x[i - 1]) - Fraction(x[j - 1])
        return value

    def polynomials(self, nvars: int) -> tuple[SparsePolynomial, SparsePolynomial]:
        return (_product(self.numerator, nvars) * self.coefficient, _product(self.denominator, nvars))


def _product(pairs: Sequence[Pair], nvars: int) -> SparsePolynomial:
    out = SparsePolynomial.one(nvars)
    for i, j in pairs:
        out = out * (SparsePolynomial.var(nvars, i) - SparsePolynomial.var(nvars, j))
    return out


@dataclass(frozen=True)
class WorkedCase:
    signature: tuple[int, ...]
    tableaux: tuple[tuple[tuple[int, ...], ...], ...]
    M: tuple[tuple[int, ...], ...]
    reference: int                                   # 1-based index of the reference tableau
    limits: tuple[FactoredRatio, ...]                # P_lambda for the reference tableau
    pure: tuple[FactoredRatio, ...] | None = None    # Z_lambda without the prefactor


def _r(num, den=(), c=1) -> FactoredRatio:
    return FactoredRatio(tuple(num), tuple(den), c)


MIXED_FOUR = WorkedCase(
    signature=(1, 1, 2, 2),
    tableaux=(((1, 2), (3, 4), (3, 4)), ((1, 3), (2, 4), (3, 4))),
    M=((1, 0), (1, 1)),
    reference=2,
    limits=(
        _r([(2, 1), (4, 3)], [(3, 1), (4, 2)]),
        _r([(3, 2), (4, 1)], [(3, 1), (4, 2)]),
    ),
)

SIX_ONES = WorkedCase(
    signature=(1,) * 6,
    tableaux=(
        ((1, 2), (3, 4), (5, 6)),
        ((1, 2), (3, 5), (4, 6)),
        ((1, 3), (2, 4), (5, 6)),
        ((1, 3), (2, 5), (4, 6)),
        ((1, 4), (2, 5), (3, 6)),
    ),
    M=((1, 0, 0, 0, 0), (1, 1, 0, 0, 0), (1, 0, 1, 0, 0), (1, 1, 1, 1, 0), (1, 1, 1, 1, 1)),
    reference=5,
    limits=(
        _r([(2, 1), (4, 3), (6, 5)], [(4, 1), (5, 2), (6, 3)]),
        _r([(2, 1), (5, 4)], [(4, 1), (5, 2)]),
        _r([(3, 2), (6, 5)], [(5, 2), (6, 3)]),
        _r([(3, 2), (5, 4), (6, 1)], [(4, 1), (5, 2), (6, 3)]),
        _r([(4, 3), (6, 1)], [(4, 1), (6, 3)]),
    ),
    pure=(
        _r([(2, 1), (4, 3), (6, 5)]),
        _r([(2, 1), (6, 3), (5, 4)]),
        _r([(4, 1), (3, 2), (6, 5)]),
        _r([(6, 1), (3, 2), (5, 4)]),
        _r([(6, 1), (5, 2), (4, 3)]),
    ),
)

_DEN6 = [(1, 3), (1, 5), (2, 4), (2, 6), (3, 5), (4, 6)]

ALTERNATING = WorkedCase(
    signature=(1, 2, 1, 2, 1, 2),
    tableaux=(
        ((1, 2, 3), (2, 4, 6), (4, 5, 6)),
        ((1, 2, 4), (2, 3, 6), (4, 5, 6)),
        ((1, 2, 4), (2, 4, 6), (3, 5, 6)),
        ((1, 2, 5), (2, 4, 6), (3, 4, 6)),
        ((1, 3, 4), (2, 4, 6), (2, 5, 6)),
        ((1, 3, 5), (2, 4, 6), (2, 4, 6)),
    ),
    M=(
        (1, 0, 0, 0, 0, 0),
        (1, 1, 0, 0, 0, 0),
        (1, 1, 1, 0, 0, 0),
        (0, 1, 1, 1, 0, 0),
        (0, 1, 1, 0, 1, 0),
        (1, 2, 1, 1, 1, 1),
    ),
    reference=6,
    limits=(
        _r([(2, 1), (3, 2), (4, 5), (5, 6)], [(1, 5), (2, 4), (2, 6), (3, 5)]),
        _r([(1, 2), (1, 6), (2, 3), (3, 4), (4, 5), (5, 6)], _DEN6, 2),
        _r([(1, 2), (1, 4), (2, 5), (3, 4), (3, 6), (5, 6)], _DEN6),
        _r([(1, 2), (1, 6), (3, 4), (4, 5)], [(1, 3), (1, 5), (2, 4), (4, 6)]),
        _r([(1, 6), (3, 2), (3, 4), (5, 6)], [(1, 3), (2, 6), (3, 5), (6, 4)]),
        _r([(1, 4), (1, 6), (2, 3), (2, 5), (3, 6), (4, 5)], _DEN6),
    ),
    pure=(
        _r([(2, 1), (3, 1), (3, 2), (4, 2), (6, 2), (5, 4), (4, 6), (4, 6), (6, 5)]),
        _r([(2, 1), (6, 1), (3, 2), (4, 2), (6, 2), (3, 4), (5, 4), (4, 6), (6, 5)]),
        _r([(1, 2), (1, 4), (2, 4), (2, 5), (2, 6), (4, 3), (3, 6), (4, 6), (5, 6)]),
        _r([(1, 2), (1, 6), (2, 4), (2, 6), (2, 6), (4, 3), (3, 5), (4, 5), (4, 6)]),
        _r([(1, 5), (1, 6), (3, 2), (2, 4), (2, 4), (2, 6), (3, 4), (4, 6), (5, 6)]),
        _r([(1, 4), (1, 6), (3, 2), (2, 4), (2, 5), (2, 6), (3, 6), (4, 5), (4, 6)]),
    ),
)

WORKED_CASES = (MIXED_FOUR, SIX_ONES, ALTERNATING)


def case_for(signature: Sequence[int]) -> WorkedCase | None:
    for case in WORKED_CASES:
        if case.signature == tuple(signature):
            return case
    return None
