"""Exact sparse multivariate polynomials, Specht polynomials and group-algebra actions.

Coefficients are Python ints or ``fractions.Fraction``; nothing in this
module touches floating point.  Variables are 1-based: ``x1 .. xm``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import comb
from typing import Iterable, Mapping, Sequence

from . import exact
from .combinatorics import Filling, Signature, row_sums
from .errors import DegreeMismatch, RepeatedIndex

Number = int | Fraction
Exps = tuple[int, ...]


def _norm(c: Number) -> Number:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class SparsePolynomial:
    """Map from exponent tuples to nonzero exact coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exps, Number] | None = None):
        self.nvars = nvars
        self.terms: dict[Exps, Number] = {}
        self._hash = None
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise DegreeMismatch(f"exponent {e} has wrong length for {nvars} variables")
                if c:
                    self.terms[tuple(e)] = _norm(c)

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exps, Number]) -> "SparsePolynomial":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "SparsePolynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: Number) -> "SparsePolynomial":
        return cls._raw(nvars, {(0,) * nvars: _norm(c)} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "SparsePolynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int) -> "SparsePolynomial":
        e = [0] * nvars
        e[i - 1] = 1
        return cls._raw(nvars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Number = 1) -> "SparsePolynomial":
        return cls._raw(len(exps), {tuple(exps): _norm(c)} if c else {})

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            if other.nvars != self.nvars:
                raise DegreeMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return SparsePolynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _norm(v)
            else:
                out.pop(e, None)
        return SparsePolynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return SparsePolynomial.zero(self.nvars)
            return SparsePolynomial._raw(self.nvars, {e: _norm(c * other) for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exps, Number] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return SparsePolynomial._raw(self.nvars, {e: _norm(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = SparsePolynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SparsePolynomial.constant(self.nvars, other)
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    # -- calculus and substitution ---------------------------------------
    def diff(self, i: int, times: int = 1) -> "SparsePolynomial":
        out: dict[Exps, Number] = {}
        k = i - 1
        for e, c in self.terms.items():
            a = e[k]
            if a < times:
                continue
            factor = 1
            for j in range(times):
                factor *= a - j
            ne = e[:k] + (a - times,) + e[k + 1:]
            out[ne] = c * factor
        return SparsePolynomial._raw(self.nvars, out)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def evaluate(self, point: Sequence[Number]) -> Number:
        if len(point) != self.nvars:
            raise DegreeMismatch("point has wrong dimension")
        total: Number = 0
        for e, c in self.terms.items():
            v = c
            for x, a in zip(point, e):
                if a:
                    v *= x ** a
            total += v
        return _norm(total)

    def rename(self, mapping: Sequence[int], nvars: int) -> "SparsePolynomial":
        """Substitute x_i -> x_{mapping[i-1]} in a ring with ``nvars`` variables.

        Several old variables may map onto the same new one.
        """
        out: dict[Exps, Number] = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, a in enumerate(e):
                if a:
                    ne[mapping[i] - 1] += a
            t = tuple(ne)
            out[t] = out.get(t, 0) + c
        return SparsePolynomial._raw(nvars, {e: _norm(c) for e, c in out.items() if c})

    def permute(self, perm: Sequence[int]) -> "SparsePolynomial":
        """Action x_i -> x_{perm[i-1]} of a permutation given in one-line notation."""
        if len(perm) != self.nvars:
            raise DegreeMismatch(f"permutation of {len(perm)} letters on {self.nvars} variables")
        return self.rename(perm, self.nvars)

    def coefficient(self, exps: Sequence[int]) -> Number:
        return self.terms.get(tuple(exps), 0)

    def leading_exponent(self) -> Exps:
        """Largest exponent under lexicographic order (x1 > x2 > ...)."""
        return max(self.terms)

    def sorted_terms(self) -> list[tuple[Exps, Number]]:
        """Terms in graded lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    # -- text form ---------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        for e, c in self.sorted_terms():
            mon = " ".join(f"x{i + 1}^{a}" for i, a in enumerate(e) if a)
            lines.append(f"{c} * {mon}" if mon else f"{c}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, nvars: int) -> "SparsePolynomial":
        terms: dict[Exps, Number] = {}
        for line in text.strip().splitlines():
            line = line.strip()
            if not line:
                continue
            coeff, _, mon = line.partition("*")
            e = [0] * nvars
            for i, a in re.findall(r"x(\d+)\^(\d+)", mon):
                e[int(i) - 1] += int(a)
            c = Fraction(coeff.strip())
            terms[tuple(e)] = terms.get(tuple(e), 0) + c
        return cls(nvars, terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mon = "*".join(f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a)
            parts.append(f"{c}" + (f"*{mon}" if mon else "") if c != 1 or not mon else mon)
        return " + ".join(parts)


def vandermonde(indices: Sequence[int], nvars: int | None = None) -> SparsePolynomial:
    """prod_{j<k} (x_{i_j} - x_{i_k}); 1 for a single index."""
    if len(set(indices)) != len(indices):
        raise RepeatedIndex(f"indices must be distinct: {tuple(indices)}")
    nvars = max(indices, default=0) if nvars is None else nvars
    out = SparsePolynomial.one(nvars)
    for j in range(len(indices)):
        for k in range(j + 1, len(indices)):
            out = out * (SparsePolynomial.var(nvars, indices[j]) - SparsePolynomial.var(nvars, indices[k]))
    return out


def _difference_power(nvars: int, i: int, j: int, m: int) -> SparsePolynomial:
    """(x_i - x_j)^m expanded binomially; repeated indices give 0 (m>0)."""
    if i == j:
        return SparsePolynomial.zero(nvars) if m else SparsePolynomial.one(nvars)
    terms: dict[Exps, Number] = {}
    for a in range(m + 1):
        e = [0] * nvars
        e[i - 1] += a
        e[j - 1] += m - a
        terms[tuple(e)] = comb(m, a) * (-1) ** (m - a)
    return SparsePolynomial._raw(nvars, terms)


def specht(F: Filling, nvars: int | None = None) -> SparsePolynomial:
    """Product over columns of the Vandermonde of the column read bottom to top.

    Repeated entries are allowed; a column repeating an entry gives 0.
    """
    nvars = max(F.entries()) if nvars is None else nvars
    factors: dict[tuple[int, int], int] = {}
    for col in F.columns():
        bottom_up = col[::-1]
        for j in range(len(bottom_up)):
            for k in range(j + 1, len(bottom_up)):
                a, b = bottom_up[j], bottom_up[k]
                if a == b:
                    return SparsePolynomial.zero(nvars)
                factors[(a, b)] = factors.get((a, b), 0) + 1
    out = SparsePolynomial.one(nvars)
    for (a, b), m in sorted(factors.items()):
        # merge (x_a - x_b) with (x_b - x_a) powers
        if (b, a) in factors and a > b:
            continue
        m_rev = factors.get((b, a), 0)
        out = out * _difference_power(nvars, a, b, m + m_rev) * (-1) ** m_rev
    return out


def specht_expanded(T: Filling, d: int | None = None) -> SparsePolynomial:
    """Signed column-group orbit sum  sum_U sgn(sigma) prod_i x_i^(r^U(i) - s_i).

    Independent of :func:`specht`; used as its oracle on column-strict tableaux.
    """
    if not T.is_csyt():
        raise ValueError(f"{T} is not column-strict")
    d = max(T.entries()) if d is None else d
    content = T.content(d)
    cols = T.columns()
    terms: dict[Exps, Number] = {}
    col_perms = [list(permutations(range(len(c)))) for c in cols]
    for choice in product(*col_perms):
        sign = 1
        rows = [list(r) for r in T.rows]
        for c, perm in enumerate(choice):
            sign *= _perm_sign(perm)
            for r, src in enumerate(perm):
                rows[r][c] = cols[c][src]
        U = Filling(tuple(tuple(r) for r in rows))
        e = tuple(r - s for r, s in zip(row_sums(U, d), content))
        terms[e] = terms.get(e, 0) + sign
    return SparsePolynomial(d, terms)


def _perm_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def perm_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation in 1-based one-line notation."""
    return _perm_sign([p - 1 for p in perm])


def eval_identify(P: SparsePolynomial, sig: Signature | Sequence[int]) -> SparsePolynomial:
    """Collapse each group x_{p_k}, ..., x_{p_k+s_k-1} onto the single variable x_k."""
    word = sig.s if isinstance(sig, Signature) else tuple(sig)
    if P.nvars != sum(word):
        raise DegreeMismatch(f"polynomial has {P.nvars} variables, signature needs {sum(word)}")
    mapping = [k + 1 for k, s in enumerate(word) for _ in range(s)]
    return P.rename(mapping, len(word))


@dataclass(frozen=True)
class GroupAlgebraElement:
    """Formal rational combination of permutations (1-based one-line notation)."""

    terms: tuple[tuple[tuple[int, ...], Number], ...]

    @classmethod
    def identity(cls, n: int) -> "GroupAlgebraElement":
        return cls(((tuple(range(1, n + 1)), 1),))

    @classmethod
    def of(cls, pairs: Iterable[tuple[Sequence[int], Number]]) -> "GroupAlgebraElement":
        merged: dict[tuple[int, ...], Number] = {}
        for perm, c in pairs:
            merged[tuple(perm)] = merged.get(tuple(perm), 0) + c
        return cls(tuple((p, c) for p, c in merged.items() if c))

    @classmethod
    def transposition(cls, n: int, i: int) -> "GroupAlgebraElement":
        perm = list(range(1, n + 1))
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
        return cls(((tuple(perm), 1),))

    @classmethod
    def symmetrizer(cls, n: int, sites: Sequence[int], signed: bool = False) -> "GroupAlgebraElement":
        """Sum over all permutations of ``sites`` (optionally with sign)."""
        sites = list(sites)
        pairs = []
        for img in permutations(sites):
            perm = list(range(1, n + 1))
            for a, b in zip(sites, img):
                perm[a - 1] = b
            pairs.append((tuple(perm), perm_sign(perm) if signed else 1))
        return cls.of(pairs)

    @property
    def degree(self) -> int:
        return len(self.terms[0][0]) if self.terms else 0

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return GroupAlgebraElement.of(list(self.terms) + list(other.terms))

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        """Composition: (self * other) acts as self after other."""
        pairs = []
        for p, a in self.terms:
            for q, b in other.terms:
                pairs.append((tuple(p[q[i] - 1] for i in range(len(q))), a * b))
        return GroupAlgebraElement.of(pairs)

    def omega(self) -> "GroupAlgebraElement":
        """Twist sigma -> sgn(sigma) sigma."""
        return GroupAlgebraElement.of((p, perm_sign(p) * c) for p, c in self.terms)


def apply_group_algebra(g: GroupAlgebraElement, P: SparsePolynomial, signed: bool = False) -> SparsePolynomial:
    """sum_sigma c_sigma [sgn(sigma)] sigma.P with sigma acting by permuting variables."""
    if g.terms and g.degree != P.nvars:
        raise DegreeMismatch(f"permutations of {g.degree} letters on {P.nvars} variables")
    out = SparsePolynomial.zero(P.nvars)
    for perm, c in g.terms:
        coeff = c * perm_sign(perm) if signed else c
        out = out + P.permute(perm) * coeff
    return out


def coefficient_matrix(polys: Sequence[SparsePolynomial]) -> list[list[Number]]:
    monomials = sorted({e for p in polys for e in p.terms})
    return [[p.terms.get(e, 0) for e in monomials] for p in polys]


def rank_of(polys: Sequence[SparsePolynomial]) -> int:
    """Rank of the span of ``polys`` over Q."""
    if not polys:
        return 0
    if len({p.nvars for p in polys}) != 1:
        raise DegreeMismatch("polynomials live in different rings")
    return exact.rank(coefficient_matrix(polys))


Pair = tuple[int, int]


class RationalFunction:
    """numerator / prod_{i<j} (x_j - x_i)^{e_ij}.

    The denominator is kept as a product of differences with positive
    leading coefficient, so zero-testing reduces to the numerator.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: SparsePolynomial, den: Mapping[Pair, int] | None = None):
        self.num = num
        self.den = {}
        for (i, j), e in (den or {}).items():
            if i == j:
                raise ZeroDivisionError("denominator factor (x_i - x_i)")
            if e < 0:
                raise ValueError("denominator exponents must be nonnegative")
            if e:
                key, sign = ((i, j), 1) if i < j else ((j, i), -1)
                self.den[key] = self.den.get(key, 0) + e
                if sign < 0 and e % 2:
                    self.num = -self.num

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def _lift(self, target: Mapping[Pair, int]) -> SparsePolynomial:
        num = self.num
        for (i, j), e in target.items():
            extra = e - self.den.get((i, j), 0)
            if extra:
                num = num * _difference_power(self.nvars, j, i, extra)
        return num

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if isinstance(other, SparsePolynomial):
            other = RationalFunction(other)
        target = dict(self.den)
        for k, e in other.den.items():
            target[k] = max(target.get(k, 0), e)
        return RationalFunction(self._lift(target) + other._lift(target), target)

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, (int, Fraction, SparsePolynomial)):
            return RationalFunction(self.num * other, self.den)
        den = dict(self.den)
        for k, e in other.den.items():
            den[k] = den.get(k, 0) + e
        return RationalFunction(self.num * other.num, den)

    __rmul__ = __mul__

    def diff(self, i: int) -> "RationalFunction":
        """Quotient rule; the denominator gains one power of each factor involving x_i."""
        target = dict(self.den)
        involved = [(a, b) for (a, b) in self.den if i in (a, b)]
        for k in involved:
            target[k] += 1
        total = RationalFunction(self.num.diff(i), self.den)
        for (a, b) in involved:
            e = self.den[(a, b)]
            # d/dx_i (x_b - x_a)^{-e} = -e * (+1 if i == b else -1) (x_b - x_a)^{-e-1}
            sign = -1 if i == b else 1
            term = RationalFunction(self.num * (sign * e), {(a, b): 1})
            total = total + RationalFunction(term.num, _merge(self.den, {(a, b): 1}))
        return total

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def evaluate(self, point: Sequence[Number]) -> Fraction:
        den = Fraction(1)
        for (i, j), e in self.den.items():
            den *= Fraction(point[j - 1] - point[i - 1]) ** e
        return Fraction(self.num.evaluate(point)) / den

    @property
    def numerator_terms(self) -> int:
        return len(self.num)


def _merge(a: Mapping[Pair, int], b: Mapping[Pair, int]) -> dict[Pair, int]:
    out = dict(a)
    for k, e in b.items():
        out[k] = out.get(k, 0) + e
    return out
