"""Exact sums of Laurent-type terms  c * x^a * prod (x_i - x_j)^(-e)  with a canonical form.

A :class:`PoleSum` holds terms with a monomial part and a set of pole
factors ``1/(x_i - x_j)^e`` (always stored with i < j).  :meth:`PoleSum.normal_form`
rewrites the sum in the basis where, for each variable x_k in turn, the
factor depending on x_k is either a power x_k^p or a single pole
(x_k - x_t)^(-r) with t > k.  That basis is linearly independent, so an
expression vanishes identically exactly when its normal form is empty.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

Number = int | Fraction
Poles = tuple[tuple[tuple[int, int], int], ...]
Key = tuple[tuple[int, ...], Poles]


def _merge_poles(p: Poles, q: Poles) -> Poles:
    if not p:
        return q
    if not q:
        return p
    out = dict(p)
    for k, e in q:
        out[k] = out.get(k, 0) + e
    return tuple(sorted((k, e) for k, e in out.items() if e))


def _mul_keys(k1: Key, k2: Key) -> Key:
    return tuple(a + b for a, b in zip(k1[0], k2[0])), _merge_poles(k1[1], k2[1])


class PoleSum:
    """Dictionary ``Key -> coefficient`` over ``nvars`` variables (1-based)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Key, Number] | None = None):
        self.nvars = nvars
        self.terms: dict[Key, Number] = {k: v for k, v in (terms or {}).items() if v}

    # -- constructors -----------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c: Number = 1) -> "PoleSum":
        return cls(nvars, {((0,) * nvars, ()): c})

    @classmethod
    def inverse_difference(cls, nvars: int, i: int, j: int, power: int = 1) -> "PoleSum":
        """1/(x_i - x_j)^power for i != j."""
        if i == j:
            raise ZeroDivisionError("pole at x_i - x_i")
        sign = 1 if i < j or power % 2 == 0 else -1
        a, b = min(i, j), max(i, j)
        return cls(nvars, {((0,) * nvars, (((a, b), power),)): sign})

    @classmethod
    def power(cls, nvars: int, i: int, p: int, c: Number = 1) -> "PoleSum":
        e = [0] * nvars
        e[i - 1] = p
        return cls(nvars, {(tuple(e), ()): c})

    # -- arithmetic --------------------------------------------------------
    def copy(self) -> "PoleSum":
        return PoleSum(self.nvars, dict(self.terms))

    def add_into(self, other: "PoleSum", scale: Number = 1) -> None:
        t = self.terms
        for k, v in other.terms.items():
            nv = t.get(k, 0) + v * scale
            if nv:
                t[k] = nv
            else:
                t.pop(k, None)

    def __add__(self, other: "PoleSum") -> "PoleSum":
        out = self.copy()
        out.add_into(other)
        return out

    def __sub__(self, other: "PoleSum") -> "PoleSum":
        out = self.copy()
        out.add_into(other, -1)
        return out

    def __neg__(self):
        return PoleSum(self.nvars, {k: -v for k, v in self.terms.items()})

    def scale(self, c: Number) -> "PoleSum":
        if not c:
            return PoleSum(self.nvars)
        return PoleSum(self.nvars, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other) -> "PoleSum":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out: dict[Key, Number] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = _mul_keys(k1, k2)
                out[k] = out.get(k, 0) + v1 * v2
        return PoleSum(self.nvars, out)

    __rmul__ = __mul__

    def diff(self, i: int) -> "PoleSum":
        out: dict[Key, Number] = {}
        idx = i - 1
        for (mono, poles), c in self.terms.items():
            a = mono[idx]
            if a:
                nm = mono[:idx] + (a - 1,) + mono[idx + 1:]
                k = (nm, poles)
                out[k] = out.get(k, 0) + c * a
            for pos, ((p, q), e) in enumerate(poles):
                if i == p:
                    factor = -e
                elif i == q:
                    factor = e
                else:
                    continue
                np_ = poles[:pos] + (((p, q), e + 1),) + poles[pos + 1:]
                k = (mono, np_)
                out[k] = out.get(k, 0) + c * factor
        return PoleSum(self.nvars, out)

    def evaluate(self, point: Sequence[Number]) -> Fraction:
        total = Fraction(0)
        for (mono, poles), c in self.terms.items():
            v = Fraction(c)
            for x, a in zip(point, mono):
                if a:
                    v *= Fraction(x) ** a
            for (p, q), e in poles:
                v /= Fraction(point[p - 1] - point[q - 1]) ** e
            total += v
        return total

    def is_zero(self) -> bool:
        return not self.normal_form()

    def __len__(self):
        return len(self.terms)

    # -- canonical form -----------------------------------------------------
    def normal_form(self) -> dict[tuple, Number]:
        """Coefficients in the canonical basis; empty iff the function is 0."""
        d = self.nvars
        current: dict[tuple, Number] = {((), k): c for k, c in self.terms.items()}
        for var in range(1, d + 1):
            nxt: dict[tuple, Number] = {}
            for (prefix, (mono, poles)), c in current.items():
                a = mono[var - 1]
                mine = tuple((q, e) for (p, q), e in poles if p == var)
                rest_poles = tuple(pe for pe in poles if pe[0][0] != var)
                rest_mono = mono[:var - 1] + (0,) + mono[var:]
                for basis, coeff in _expand(a, mine, d):
                    for ck, cv in coeff:
                        key = (prefix + (basis,), _mul_keys((rest_mono, rest_poles), ck))
                        v = nxt.get(key, 0) + c * cv
                        if v:
                            nxt[key] = v
                        else:
                            nxt.pop(key, None)
            current = nxt
        return {prefix: c for (prefix, _), c in current.items()}

    def to_rational(self):
        """Clear denominators into a :class:`~w3blocks.poly.RationalFunction`."""
        from .poly import RationalFunction, SparsePolynomial, _difference_power
        den: dict[tuple[int, int], int] = {}
        for (_, poles), _c in self.terms.items():
            for k, e in poles:
                den[k] = max(den.get(k, 0), e)
        num = SparsePolynomial.zero(self.nvars)
        cache: dict[tuple[int, int, int], SparsePolynomial] = {}
        for (mono, poles), c in self.terms.items():
            term = SparsePolynomial.monomial(mono, c)
            have = dict(poles)
            for (p, q), e in den.items():
                extra = e - have.get((p, q), 0)
                if extra:
                    if (p, q, extra) not in cache:
                        cache[(p, q, extra)] = _difference_power(self.nvars, p, q, extra)
                    term = term * cache[(p, q, extra)]
            num = num + term
        # denominators here are (x_p - x_q) with p < q; RationalFunction stores (x_q - x_p)
        sign = (-1) ** sum(den.values())
        return RationalFunction(num * sign, den)


@lru_cache(maxsize=None)
def _expand(a: int, poles: tuple[tuple[int, int], ...], d: int):
    """Rewrite x^a / prod (x - x_t)^e  as  sum basis(x) * coefficient(other variables).

    Returns a tuple of (basis, ((key, coeff), ...)) where basis is ('x', p)
    or ('p', t, r), and keys are over ``d`` variables not involving x.
    """
    acc: dict[tuple, dict[Key, Number]] = {}
    _expand_into(a, dict(poles), d, Fraction(1), ((0,) * d, ()), acc)
    return tuple((b, tuple((k, v) for k, v in coeffs.items() if v)) for b, coeffs in acc.items()
                 if any(coeffs.values()))


def _add(acc, basis, key: Key, c: Number) -> None:
    slot = acc.setdefault(basis, {})
    slot[key] = slot.get(key, 0) + c


def _unit(d: int, t: int, p: int) -> tuple[int, ...]:
    e = [0] * d
    e[t - 1] = p
    return tuple(e)


def _expand_into(a: int, poles: dict[int, int], d: int, c: Number, coeff: Key, acc) -> None:
    poles = {t: e for t, e in poles.items() if e}
    if not poles:
        _add(acc, ("x", a), coeff, c)
        return
    if len(poles) == 1:
        (t, e), = poles.items()
        # x = (x - x_t) + x_t
        for i in range(a + 1):
            ci = c * comb(a, i)
            if i < e:
                key = _mul_keys(coeff, (_unit(d, t, a - i), ()))
                _add(acc, ("p", t, e - i), key, ci)
            else:
                m = i - e
                for j in range(m + 1):
                    key = _mul_keys(coeff, (_unit(d, t, a - i + m - j), ()))
                    _add(acc, ("x", j), key, ci * comb(m, j) * (-1) ** (m - j))
        return
    t1, t2 = sorted(poles)[:2]
    # 1/((x-y)(x-z)) = (1/(y-z)) (1/(x-y) - 1/(x-z))
    new_coeff = _mul_keys(coeff, ((0,) * d, (((t1, t2), 1),)))
    p1 = dict(poles)
    p1[t2] -= 1
    _expand_into(a, p1, d, c, new_coeff, acc)
    p2 = dict(poles)
    p2[t1] -= 1
    _expand_into(a, p2, d, -c, new_coeff, acc)


def sum_of(terms: Iterable[PoleSum], nvars: int) -> PoleSum:
    out = PoleSum(nvars)
    for t in terms:
        out.add_into(t)
    return out
