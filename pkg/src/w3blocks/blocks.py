"""Conformal blocks at c=2 as exponent matrices, and the differential checks run on them.

A block is the power product  U_T = prod_{i<j} (x_j - x_i)^alpha(i,j)  with
alpha(i,j) = psi(i,j) - s_i s_j / 3, where psi counts the rows of T holding
both i and j.  Differential operators act through the twisted derivation

    D_i(R) = d_i R + R * sum_{k != i} alpha(i,k) / (x_i - x_k),

so that  (d_{i1} ... d_{ik} U) / U = D_{i1} ... D_{ik}(1)  is a rational function
and every residual can be tested for exact vanishing.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .combinatorics import Filling, Signature, make_signature, standardize
from .errors import (ColumnCountMismatch, DegenerateMobius, IndexOutOfRange, NotRowStrict,
                     ShapeContentMismatch, ZeroBeta)
from .pfrac import PoleSum
from .poly import RationalFunction, SparsePolynomial, specht

THIRD = Fraction(1, 3)


@dataclass(frozen=True)
class CftParams:
    beta: Fraction
    c: Fraction
    h: Fraction


def params_from_beta(beta: Fraction | int = 1) -> CftParams:
    beta = Fraction(beta)
    if beta == 0:
        raise ZeroBeta("beta must be nonzero")
    c = 2 - 24 * (beta - 1 / beta) ** 2
    h = Fraction(4, 3) * beta ** 2 - 1
    return CftParams(beta, c, h)


# -- exponent matrices --------------------------------------------------------

@dataclass(frozen=True)
class ExponentMatrix:
    """Symmetric d x d matrix of exponents with diagonal -s_i^2/3."""

    alpha: tuple[tuple[Fraction, ...], ...]
    signature: Signature
    label: str = ""

    @property
    def d(self) -> int:
        return len(self.alpha)

    def __call__(self, i: int, j: int) -> Fraction:
        return self.alpha[i - 1][j - 1]

    def pairs(self):
        """(i, j, alpha) for i < j, 1-based."""
        for i in range(1, self.d + 1):
            for j in range(i + 1, self.d + 1):
                yield i, j, self(i, j)

    def evaluate_cubed(self, point: Sequence[Fraction]) -> Fraction:
        """U(x)^3, exact since 3*alpha is an integer."""
        out = Fraction(1)
        for i, j, a in self.pairs():
            out *= Fraction(point[j - 1] - point[i - 1]) ** int(3 * a)
        return out

    def evaluate(self, point: Sequence[float]) -> float:
        out = 1.0
        for i, j, a in self.pairs():
            out *= float(point[j - 1] - point[i - 1]) ** float(a)
        return out

    def to_json(self) -> dict:
        return {"signature": list(self.signature.s),
                "alpha": [[str(a) for a in row] for row in self.alpha],
                "tableau": self.label}


def _from_offdiagonal(sig: Signature, off: dict[tuple[int, int], Fraction], label: str) -> ExponentMatrix:
    d = sig.d
    rows = []
    for i in range(1, d + 1):
        row = []
        for j in range(1, d + 1):
            if i == j:
                row.append(-Fraction(sig.s[i - 1] ** 2, 3))
            else:
                row.append(off[(min(i, j), max(i, j))])
        rows.append(tuple(row))
    return ExponentMatrix(tuple(rows), sig, label)


def _validate_block_tableau(T: Filling, sig: Signature, nonrectangular: bool) -> None:
    if not T.rows_strict() or not T.columns_weak():
        raise NotRowStrict(f"{T} is not row-strict")
    if T.content(sig.d) != sig.s:
        raise ShapeContentMismatch(f"{T} does not have content {sig.s}")
    shape = tuple(len(r) for r in T.rows)
    if nonrectangular:
        if len(shape) != 3:
            raise ShapeContentMismatch(f"block tableaux need 3 rows, got shape {shape}")
    elif shape != (sig.n // 3,) * 3:
        raise ShapeContentMismatch(f"shape {shape} is not the rectangle ({sig.n // 3},)*3; pass nonrectangular=True")


def row_pair_counts(T: Filling, d: int) -> dict[tuple[int, int], int]:
    """psi(i,j) for i<j: the number of rows of T containing both i and j."""
    psi = {(i, j): 0 for i in range(1, d + 1) for j in range(i + 1, d + 1)}
    for row in T.rows:
        for a, b in combinations(sorted(row), 2):
            if a != b:
                psi[(a, b)] += 1
    return psi


def block_exponents(T: Filling, sig: Signature, nonrectangular: bool = False) -> ExponentMatrix:
    """Exponents alpha(i,j) = psi(i,j) - s_i s_j/3 of the block attached to the row-strict tableau T."""
    _validate_block_tableau(T, sig, nonrectangular)
    s = sig.s
    off = {(i, j): p - Fraction(s[i - 1] * s[j - 1], 3) for (i, j), p in row_pair_counts(T, sig.d).items()}
    return _from_offdiagonal(sig, off, str(T))


def second_representation(T: Filling, sig: Signature, nonrectangular: bool = False) -> ExponentMatrix:
    """Same block built from the standardized numbering over n points, then collapsed group by group."""
    _validate_block_tableau(T, sig, nonrectangular)
    n = sig.n
    Tt = standardize(T, sig, reading="column_wise")
    psi = row_pair_counts(Tt, n)
    group_of = [0] * (n + 1)
    for k in range(1, sig.d + 1):
        for a in sig.group(k):
            group_of[a] = k
    off: dict[tuple[int, int], Fraction] = {(i, j): Fraction(0) for i in range(1, sig.d + 1)
                                             for j in range(i + 1, sig.d + 1)}
    for (a, b), p in psi.items():
        e = p - THIRD
        ga, gb = group_of[a], group_of[b]
        if ga == gb:
            e += THIRD
            if e != 0:
                raise ValueError(f"intra-group exponent {e} does not vanish for {a},{b}")
            continue
        off[(ga, gb)] += e
    return _from_offdiagonal(sig, off, str(T))


def alpha_identities_hold(alpha: ExponentMatrix, rectangular: bool = True) -> bool:
    """Square identity, bounds, and (for rectangles) the row-sum and total-sum laws."""
    s, q = alpha.signature.s, alpha.signature.q
    for i, j, a in alpha.pairs():
        if (3 * a).denominator != 1:
            return False
        if a * a != Fraction(2, 9) + q[i - 1] * q[j - 1] * a / 3:
            return False
        lo = -Fraction(s[i - 1] * s[j - 1], 3)
        if not lo <= a <= min(s[i - 1], s[j - 1]) + lo:
            return False
    if rectangular:
        for j in range(1, alpha.d + 1):
            if sum(alpha(j, k) for k in range(1, alpha.d + 1)) != -s[j - 1]:
                return False
        if sum(a for _, _, a in alpha.pairs()) != -Fraction(alpha.d, 3):
            return False
    return True


# -- twisted derivation calculus -----------------------------------------------

class BlockCalculus:
    """Caches (d_{i1}..d_{ik} U)/U for one exponent matrix."""

    def __init__(self, alpha: ExponentMatrix):
        self.alpha = alpha
        self.d = alpha.d
        self._log = {}
        self._cache: dict[tuple[int, ...], PoleSum] = {(): PoleSum.constant(self.d)}

    def log_derivative(self, i: int) -> PoleSum:
        """sum_{k != i} alpha(i,k) / (x_i - x_k)."""
        if i not in self._log:
            out = PoleSum(self.d)
            for k in range(1, self.d + 1):
                if k != i and self.alpha(i, k):
                    out.add_into(PoleSum.inverse_difference(self.d, i, k), self.alpha(i, k))
            self._log[i] = out
        return self._log[i]

    def twisted(self, i: int, R: PoleSum) -> PoleSum:
        out = R.diff(i)
        out.add_into(R * self.log_derivative(i))
        return out

    def derivative(self, *indices: int) -> PoleSum:
        """(d_{indices} U) / U; derivatives commute so the key is sorted."""
        for i in indices:
            if not 1 <= i <= self.d:
                raise IndexOutOfRange(f"index {i} outside 1..{self.d}")
        key = tuple(sorted(indices))
        if key not in self._cache:
            self._cache[key] = self.twisted(key[0], self.derivative(*key[1:]))
        return self._cache[key]

    def derivative_in_order(self, *indices: int) -> PoleSum:
        """Uncached application, innermost index last; used for the mixed-partial check."""
        R = PoleSum.constant(self.d)
        for i in reversed(indices):
            R = self.twisted(i, R)
        return R


def _inv(d: int, i: int, j: int, power: int = 1) -> PoleSum:
    return PoleSum.inverse_difference(d, i, j, power)


@dataclass
class Residual:
    """(operator applied to U) / U, kept as a sum of pole terms."""

    expression: PoleSum
    operator: str = ""
    _normal: dict | None = field(default=None, repr=False)

    def normal_form(self) -> dict:
        if self._normal is None:
            self._normal = self.expression.normal_form()
        return self._normal

    def is_zero(self, prepass: int = 20, seed: int = 0) -> bool:
        """Random-point pre-pass (can only prove nonvanishing), then the canonical form."""
        d = self.expression.nvars
        rng = random.Random(seed)
        for _ in range(prepass):
            point = _random_distinct_point(rng, d)
            if self.expression.evaluate(point) != 0:
                return False
        return not self.normal_form()

    def is_zero_by_clearing(self) -> bool:
        """Clear all denominators and expand the numerator; independent of the normal form."""
        return self.expression.to_rational().is_zero()

    @property
    def numerator_terms(self) -> int:
        return len(self.normal_form())


def _random_distinct_point(rng: random.Random, d: int) -> list[Fraction]:
    while True:
        pt = [Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 997)) for _ in range(d)]
        if len(set(pt)) == d:
            return pt


def _check_m(m: int, d: int) -> None:
    if not 1 <= m <= d:
        raise IndexOutOfRange(f"point index {m} outside 1..{d}")


def bpz_residual(m: int, alpha: ExponentMatrix, params: CftParams | None = None) -> Residual:
    """Third-order null-vector operator at point m applied to the block."""
    params = params or params_from_beta(1)
    calc = alpha if isinstance(alpha, BlockCalculus) else BlockCalculus(alpha)
    d, q, h = calc.d, calc.alpha.signature.q, params.h
    _check_m(m, d)
    qm = q[m - 1]
    others = [i for i in range(1, d + 1) if i != m]
    out = calc.derivative(m, m, m).scale(qm)
    c1 = 3 * (h + 1) / 4
    c2 = 3 * (h + 1) / 32
    c3 = -3 * (h + 1) ** 2 / 8
    c4 = -h * (h + 1) * (h + 5) / 16
    c5 = 3 * h * (h + 1) ** 2 / 8
    for i in others:
        qi = q[i - 1]
        inv1, inv2 = _inv(d, i, m), _inv(d, i, m, 2)
        first = calc.derivative(m, i).scale(qm) + calc.derivative(i, i).scale(qi)
        out.add_into(first * inv1, c1)
        second = (calc.derivative(i).scale((5 + h) * qm - (5 * h + 1) * qi)
                  - calc.derivative(m).scale(4 * (2 * h * qm + (h + 1) * qi)))
        out.add_into(second * inv2, c2)
        out.add_into(_inv(d, i, m, 3).scale(qi + 3 * qm), c4)
        for j in others:
            if j == i:
                continue
            base = _inv(d, m, i) * _inv(d, j, i)
            out.add_into(base * calc.derivative(j), c3 * qi)
            out.add_into(_inv(d, m, i) * _inv(d, j, i, 2), c5 * qi)
    return Residual(out, f"BPZ{m}")


def ward_residual(m: int, alpha: ExponentMatrix, params: CftParams | None = None) -> Residual:
    """Second-order Ward operator number m (1..5) applied to the block."""
    if not 1 <= m <= 5:
        raise IndexOutOfRange(f"Ward identity index {m} outside 1..5")
    params = params or params_from_beta(1)
    calc = alpha if isinstance(alpha, BlockCalculus) else BlockCalculus(alpha)
    d, q, h = calc.d, calc.alpha.signature.q, params.h
    out = PoleSum(d)
    for i in range(1, d + 1):
        qi = q[i - 1]
        xi = PoleSum.power(d, i, m - 1, qi)
        out.add_into(xi * calc.derivative(i, i))
        inner = PoleSum(d)
        for j in range(1, d + 1):
            if j == i:
                continue
            inner.add_into(_inv(d, j, i, 2), h)
            inner.add_into(calc.derivative(j) * _inv(d, j, i), -1)
        out.add_into(xi * inner, -(h + 1) / 2)
        if m >= 2:
            out.add_into(PoleSum.power(d, i, m - 2, qi) * calc.derivative(i), Fraction(m - 1, 8) * (5 * h + 1))
        if m >= 3:
            out.add_into(PoleSum.power(d, i, m - 3, qi), Fraction((m - 1) * (m - 2), 24) * h * (5 * h + 1))
    return Residual(out, f"WI{m}")


def global_ward_residual(k: int, alpha: ExponentMatrix, params: CftParams | None = None) -> Residual:
    """First-order global Ward identity k (1..3) applied to the block."""
    if not 1 <= k <= 3:
        raise IndexOutOfRange(f"global Ward index {k} outside 1..3")
    params = params or params_from_beta(1)
    calc = alpha if isinstance(alpha, BlockCalculus) else BlockCalculus(alpha)
    d, h = calc.d, params.h
    out = PoleSum(d)
    for i in range(1, d + 1):
        out.add_into(PoleSum.power(d, i, k - 1) * calc.derivative(i))
        if k == 2:
            out.add_into(PoleSum.constant(d, h))
        elif k == 3:
            out.add_into(PoleSum.power(d, i, 1, 2 * h))
    return Residual(out, f"GW{k}")


def all_residuals(alpha: ExponentMatrix, params: CftParams | None = None) -> list[Residual]:
    """The d BPZ, five Ward and three global Ward residuals."""
    calc = BlockCalculus(alpha)
    out = [bpz_residual(m, calc, params) for m in range(1, alpha.d + 1)]
    out += [ward_residual(m, calc, params) for m in range(1, 6)]
    out += [global_ward_residual(k, calc, params) for k in range(1, 4)]
    return out


def check_report(alpha: ExponentMatrix, residual: Residual, elapsed_ms: float) -> dict:
    return {"tableau": alpha.label, "operator": residual.operator,
            "residual_zero": residual.is_zero(), "numerator_terms": residual.numerator_terms,
            "wall_time_ms": round(elapsed_ms, 3)}


def verify_block(alpha: ExponentMatrix, params: CftParams | None = None,
                 which: Sequence[str] = ("bpz", "ward", "global")) -> list[dict]:
    """Run the selected operator families on one block and return JSON-ready reports."""
    calc = BlockCalculus(alpha)
    jobs = []
    if "bpz" in which:
        jobs += [lambda m=m: bpz_residual(m, calc, params) for m in range(1, alpha.d + 1)]
    if "ward" in which:
        jobs += [lambda m=m: ward_residual(m, calc, params) for m in range(1, 6)]
    if "global" in which:
        jobs += [lambda k=k: global_ward_residual(k, calc, params) for k in range(1, 4)]
    reports = []
    for job in jobs:
        start = time.perf_counter()
        r = job()
        r.is_zero()
        reports.append(check_report(alpha, r, (time.perf_counter() - start) * 1000))
    return reports


# -- covariance ----------------------------------------------------------------

def covariance_check(alpha: ExponentMatrix, mobius: Sequence[Fraction | int],
                     sample: Sequence[Sequence[Fraction | int]]) -> bool:
    """U(phi(x))^3 * prod phi'(x_i) == U(x)^3 at every sample point, with phi increasing on it."""
    a, b, c, dd = (Fraction(v) for v in mobius)
    det = a * dd - b * c
    if det == 0:
        raise DegenerateMobius("ad - bc must be nonzero")
    for point in sample:
        x = [Fraction(v) for v in point]
        if any(c * xi + dd == 0 for xi in x):
            return False
        y = [(a * xi + b) / (c * xi + dd) for xi in x]
        if any(y[i + 1] <= y[i] for i in range(len(y) - 1)) or any(x[i + 1] <= x[i] for i in range(len(x) - 1)):
            return False
        jac = Fraction(1)
        for xi in x:
            jac *= det / (c * xi + dd) ** 2
        if alpha.evaluate_cubed(y) * jac != alpha.evaluate_cubed(x):
            return False
    return True


def seeded_mobius(rng: random.Random) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """A Mobius map (a, b, c, d) with small integer entries and ad - bc > 0."""
    while True:
        a, b, c, d = (Fraction(rng.randint(-9, 9)) for _ in range(4))
        if a * d - b * c > 0:
            return a, b, c, d


def seeded_increasing_points(rng: random.Random, mobius: Sequence[Fraction], d: int,
                             count: int) -> list[list[Fraction]]:
    """Increasing rational d-tuples on one side of the pole, so the map stays increasing on them."""
    a, b, c, dd = mobius
    lo = -dd / c + Fraction(1, 7) if c else Fraction(-50)
    out = []
    while len(out) < count:
        pts = sorted({lo + Fraction(rng.randint(1, 1000), rng.randint(1, 1000)) for _ in range(d)})
        if len(pts) == d:
            out.append(pts)
    return out


def covariance_suite(alpha: ExponentMatrix, seed: int, maps: int = 5, points: int = 25) -> list[bool]:
    """One covariance result per seeded Mobius map."""
    rng = random.Random(seed)
    results = []
    for _ in range(maps):
        m = seeded_mobius(rng)
        results.append(covariance_check(alpha, m, seeded_increasing_points(rng, m, alpha.d, points)))
    return results


# -- boundary asymptotics ----------------------------------------------------------

ZERO = "ZERO"


@dataclass(frozen=True)
class BoundaryLimit:
    exponent: Fraction
    limit: ExponentMatrix | str


def boundary_limit(alpha: ExponentMatrix, j: int) -> BoundaryLimit:
    """Leading behaviour as x_{j+1} -> x_j, read off from the exponents alone."""
    sig, d = alpha.signature, alpha.d
    if not 1 <= j <= d - 1:
        raise IndexOutOfRange(f"adjacent pair index {j} outside 1..{d - 1}")
    s1, s2 = sig.s[j - 1], sig.s[j]
    exponent = THIRD if s1 == s2 else 2 * THIRD
    if alpha(j, j + 1) + exponent != 0:
        return BoundaryLimit(exponent, ZERO)
    rest = [k for k in range(1, d + 1) if k not in (j, j + 1)]
    if s1 == s2:
        merged_s = 2 if s1 == 1 else 1
        new_s, index = [], []
        for k in range(1, d + 1):
            if k == j:
                new_s.append(merged_s)
                index.append("merged")
            elif k != j + 1:
                new_s.append(sig.s[k - 1])
                index.append(k)
    else:
        for k in rest:
            if alpha(j, k) + alpha(j + 1, k) != 0:
                raise ValueError("merged point does not decouple")
        new_s = [sig.s[k - 1] for k in rest]
        index = rest
    new_sig = make_signature(new_s)

    def value(a, b):
        if a == "merged":
            return alpha(j, b) + alpha(j + 1, b)
        if b == "merged":
            return value(b, a)
        return alpha(a, b)

    off = {}
    for x in range(len(index)):
        for y in range(x + 1, len(index)):
            off[(x + 1, y + 1)] = value(index[x], index[y])
    return BoundaryLimit(exponent, _from_offdiagonal(new_sig, off, alpha.label + f"|{j}"))


def merged_tableau(T: Filling, sig: Signature, j: int) -> tuple[Filling, Signature] | None:
    """Tableau rule for the boundary limit; None when the limit vanishes."""
    s1, s2 = sig.s[j - 1], sig.s[j]
    rows_j = [r for r, row in enumerate(T.rows) if j in row]
    rows_k = [r for r, row in enumerate(T.rows) if j + 1 in row]
    if s1 == s2 == 1:
        if rows_j == rows_k:
            return None
        rows = [[j if v == j + 1 else v for v in row] for row in T.rows]
        shift, new_s = 1, list(sig.s[:j - 1]) + [2] + list(sig.s[j + 1:])
    elif s1 == s2 == 2:
        if sorted(rows_j) == sorted(rows_k):
            return None
        rows = [[j if v == j + 1 else v for v in row] for row in T.rows]
        for row in rows:
            row.remove(j)
        shift, new_s = 1, list(sig.s[:j - 1]) + [1] + list(sig.s[j + 1:])
    else:
        if set(rows_j) & set(rows_k):
            return None
        rows = [[v for v in row if v not in (j, j + 1)] for row in T.rows]
        shift, new_s = 2, list(sig.s[:j - 1]) + list(sig.s[j + 1:])
        rows = [[v - shift if v > j + 1 else v for v in row] for row in rows]
        return Filling(tuple(tuple(sorted(r)) for r in rows)), make_signature(new_s)
    rows = [[v - shift if v > j + 1 else v for v in row] for row in rows]
    return Filling(tuple(tuple(sorted(r)) for r in rows)), make_signature(new_s)


# -- Specht polynomial PDEs -----------------------------------------------------------

# Exponent tuples are packed into one int (8 bits per variable) for the
# polynomial-heavy Specht checks; this is several times faster than tuples.
_BITS = 8
_MASK = (1 << _BITS) - 1


def _pack(P: SparsePolynomial) -> dict[int, int]:
    out = {}
    for e, c in P.terms.items():
        key = 0
        for i, a in enumerate(e):
            key |= a << (_BITS * i)
        out[key] = c
    return out


def _unpack(A: dict[int, int], n: int) -> SparsePolynomial:
    terms = {}
    for key, c in A.items():
        terms[tuple((key >> (_BITS * i)) & _MASK for i in range(n))] = c
    return SparsePolynomial(n, terms)


def _p_mul(A: dict[int, int], B: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    get = out.get
    for ka, ca in A.items():
        for kb, cb in B.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _p_add_into(A: dict[int, int], B: dict[int, int], scale=1) -> None:
    for k, c in B.items():
        v = A.get(k, 0) + c * scale
        if v:
            A[k] = v
        else:
            A.pop(k, None)


def _p_diff(A: dict[int, int], i: int, times: int) -> dict[int, int]:
    shift = _BITS * (i - 1)
    out = {}
    for k, c in A.items():
        a = (k >> shift) & _MASK
        if a < times:
            continue
        f = 1
        for t in range(times):
            f *= a - t
        out[k - (times << shift)] = c * f
    return out


def _difference_product(n: int, m: int, skip: frozenset[int], cache: dict) -> dict[int, int]:
    """prod_{k != m, k not in skip} (x_k - x_m), packed."""
    if skip not in cache:
        out = {0: 1}
        xm = 1 << (_BITS * (m - 1))
        for k in range(1, n + 1):
            if k != m and k not in skip:
                out = _p_mul(out, {1 << (_BITS * (k - 1)): 1, xm: -1})
        cache[skip] = out
    return cache[skip]


def _derivative(P: dict[int, int], counts: dict[int, int], cache: dict) -> dict[int, int]:
    key = tuple(sorted((i, c) for i, c in counts.items() if c))
    if key not in cache:
        out = P
        for i, c in key:
            out = _p_diff(out, i, c)
        cache[key] = out
    return cache[key]


def specht_pde_residual(N: Filling, m: int, columns: int | tuple = 3, n: int | None = None,
                        check_columns: bool = True) -> RationalFunction:
    """Apply the Specht-polynomial PDE at point m to specht(N).

    ``columns`` is 2 or 3 for the proven operators, or an int > 3 (or
    ``("M", k)``) for the conjectural k-column operator.  Shapes with fewer
    columns than the operator order are accepted; more raise
    :class:`ColumnCountMismatch` unless ``check_columns`` is False.  The
    residual is returned over the denominator prod_{i != m} (x_i - x_m).
    """
    n = n or max(N.entries())
    _check_m(m, n)
    order = columns[1] if isinstance(columns, tuple) else columns
    if check_columns and N.shape.n_columns > order:
        raise ColumnCountMismatch(f"{N} has {N.shape.n_columns} columns, operator handles at most {order}")
    P = _pack(specht(N, n))
    prods: dict = {}
    derivs: dict = {}
    others = [i for i in range(1, n + 1) if i != m]
    num: dict[int, int] = {}

    def d(*parts: dict[int, int]) -> dict[int, int]:
        acc: dict[int, int] = {}
        for counts in parts:
            _p_add_into(acc, _derivative(P, counts, derivs))
        return acc

    def add(idx: Sequence[int], Q: dict[int, int]) -> None:
        _p_add_into(num, _p_mul(_difference_product(n, m, frozenset(idx), prods), Q))

    # pole sets are symmetric, so ordered double and triple sums collapse onto subsets
    if isinstance(columns, int) and columns == 3:
        add((), d({m: 3}))
        for i in others:
            add((i,), d({m: 2}, {i: 1, m: 1}, {i: 2}))
        for i, j in combinations(others, 2):
            add((i, j), d({m: 1}, {i: 1}, {j: 1}))
        for idx in combinations(others, 3):
            add(idx, P)
    elif isinstance(columns, int) and columns == 2:
        add((), d({m: 2}))
        for i in others:
            add((i,), d({i: 1}, {m: 1}))
        for idx in combinations(others, 2):
            add(idx, P)
    else:
        M = order
        add((), d({m: M}))
        for k in range(1, M + 1):
            for idx in combinations(others, k):
                parts = []
                for comp in _compositions(M - k, k + 1):
                    counts = {m: comp[0]}
                    for l, i in enumerate(idx):
                        counts[i] = comp[l + 1]
                    parts.append(counts)
                add(idx, d(*parts))
    den = {(m, i): 1 for i in others}
    return RationalFunction(_unpack(num, n), den)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def block_json(alpha: ExponentMatrix) -> str:
    return json.dumps(alpha.to_json())
