"""Triple-dimer connection probabilities: finite lattices and exact scaling limits.

The finite lattice is a width x height square grid (rows 1..height, row 1
at the bottom) with pendant boundary vertices hanging below row 1 near the
anchor columns.  A point outside the distinguished set S gets a black
pendant attached to the nearest white vertex of row 1; a point in S gets a
white vertex attached to the nearest black vertex and a black pendant below
it.  Vertex (c, r) of the grid is black when c + r is even.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import exact
from . import webs as W
from .combinatorics import Filling, Signature, row_content
from .errors import (AnchorsOutOfRange, CollidingPoints, NonSquareIndexSet, ParityInfeasible, TooLarge,
                     ZeroPartition)
from .poly import SparsePolynomial, specht

Number = int | Fraction | float


# -- graph ----------------------------------------------------------------------------

@dataclass
class DimerGraph:
    width: int
    height: int
    signature: Signature
    anchors: tuple[int, ...]
    S: tuple[int, ...]                                  # 1-based boundary indices with a two-step pendant
    color: dict[int, str] = field(default_factory=dict)  # vertex -> 'black' | 'white'
    pos: dict[int, tuple[float, float]] = field(default_factory=dict)
    edges: list[tuple[int, int, int]] = field(default_factory=list)  # (black, white, Kasteleyn sign)
    boundary: list[int] = field(default_factory=list)    # v_1 .. v_d

    @property
    def k(self) -> int:
        return self.signature.n // 3

    def grid_id(self, c: int, r: int) -> int:
        return (r - 1) * self.width + c

    def interior(self) -> list[int]:
        bset = set(self.boundary)
        return [v for v in self.color if v not in bset]

    def excedance(self) -> int:
        inner = self.interior()
        return (sum(1 for v in inner if self.color[v] == "white")
                - sum(1 for v in inner if self.color[v] == "black"))

    def to_json(self) -> str:
        return json.dumps({
            "width": self.width, "height": self.height,
            "signature": list(self.signature.s), "anchors": list(self.anchors), "S": list(self.S),
            "vertices": [{"id": v, "color": self.color[v], "pos": list(self.pos[v])} for v in sorted(self.color)],
            "edges": [list(e) for e in self.edges],
            "boundary": self.boundary,
        })


def distinguished_indices(sig: Signature, mode: str = "last_k") -> tuple[int, ...]:
    """The set S: the last k indices, or (mode 'valence_two') the points with s_i = 2."""
    if mode == "last_k":
        k = sig.n // 3
        return tuple(range(sig.d - k + 1, sig.d + 1))
    if mode == "valence_two":
        return tuple(i + 1 for i, s in enumerate(sig.s) if s == 2)
    raise ValueError(f"unknown mode {mode!r}")


def build_graph(width: int, height: int, sig: Signature, anchors: Sequence[int],
                mode: str = "last_k") -> DimerGraph:
    """Rectangular grid plus pendant boundary vertices; see the module docstring."""
    anchors = tuple(int(a) for a in anchors)
    if height < 1 or width < 1:
        raise AnchorsOutOfRange("grid must be at least 1 x 1")
    if len(anchors) != sig.d:
        raise AnchorsOutOfRange(f"{len(anchors)} anchors for {sig.d} boundary points")
    if any(b <= a for a, b in zip(anchors, anchors[1:])):
        raise AnchorsOutOfRange("anchors must be strictly increasing")
    if anchors and (anchors[0] < 0 or anchors[-1] > width - 1):
        raise AnchorsOutOfRange("anchors must lie inside the grid columns")
    if (width * height) % 2:
        raise ParityInfeasible("grid has unequal colour classes; no multiweb exists")
    S = distinguished_indices(sig, mode)
    g = DimerGraph(width, height, sig, anchors, S)
    for r in range(1, height + 1):
        for c in range(width):
            v = g.grid_id(c, r)
            g.color[v] = "black" if (c + r) % 2 == 0 else "white"
            g.pos[v] = (float(c), float(r))
    for r in range(1, height + 1):
        for c in range(width):
            v = g.grid_id(c, r)
            if c + 1 < width:
                _add_edge(g, v, g.grid_id(c + 1, r), 1)
            if r + 1 <= height:
                _add_edge(g, v, g.grid_id(c, r + 1), -1 if c % 2 else 1)
    next_id = width * height
    attach_cols = []
    for i, a in enumerate(anchors, start=1):
        want = "black" if i in S else "white"
        c = a if g.color[g.grid_id(a, 1)] == want else (a + 1 if a + 1 < width else a - 1)
        if c < 0:
            raise AnchorsOutOfRange(f"no {want} vertex near anchor {a}")
        attach_cols.append(c)
        target = g.grid_id(c, 1)
        if i in S:
            u, v = next_id, next_id + 1
            next_id += 2
            g.color[u], g.pos[u] = "white", (float(a), 0.0)
            g.color[v], g.pos[v] = "black", (float(a), -1.0)
            _add_edge(g, target, u, 1)
            _add_edge(g, v, u, 1)
        else:
            v = next_id
            next_id += 1
            g.color[v], g.pos[v] = "black", (float(a), 0.0)
            _add_edge(g, v, target, 1)
        g.boundary.append(v)
    if any(b <= a for a, b in zip(attach_cols, attach_cols[1:])):
        raise AnchorsOutOfRange("pendant edges would cross or share an attachment vertex")
    if g.excedance() != len(S):
        raise ParityInfeasible(f"excedance {g.excedance()} differs from |S| = {len(S)}")
    return g


def _add_edge(g: DimerGraph, a: int, b: int, sign: int) -> None:
    black, white = (a, b) if g.color[a] == "black" else (b, a)
    if g.color[black] != "black" or g.color[white] != "white":
        raise ValueError("edges must join opposite colours")
    g.edges.append((black, white, sign))


# -- partition functions ---------------------------------------------------------------

def _restricted_vertices(g: DimerGraph, keep: Iterable[int] | None) -> tuple[list[int], list[int]]:
    """Black and white vertices after deleting the boundary points not in keep (1-based)."""
    removed = set() if keep is None else {g.boundary[j - 1] for j in range(1, g.signature.d + 1) if j not in set(keep)}
    blacks = sorted(v for v, c in g.color.items() if c == "black" and v not in removed)
    whites = sorted(v for v, c in g.color.items() if c == "white" and v not in removed)
    return blacks, whites


def kasteleyn_matrix(g: DimerGraph, keep: Iterable[int] | None = None) -> tuple[list[list[int]], list[int], list[int]]:
    blacks, whites = _restricted_vertices(g, keep)
    bi = {v: i for i, v in enumerate(blacks)}
    wi = {v: i for i, v in enumerate(whites)}
    K = [[0] * len(whites) for _ in blacks]
    for b, w, s in g.edges:
        if b in bi and w in wi:
            K[bi[b]][wi[w]] = s
    return K, blacks, whites


def dimer_partition(g: DimerGraph, keep: Iterable[int] | None = None, backend: str = "exact") -> Number:
    """Number of perfect matchings of g minus the boundary points not in keep."""
    K, blacks, whites = kasteleyn_matrix(g, keep)
    if len(blacks) != len(whites):
        return 0
    if not blacks:
        return 1
    if backend == "exact":
        return abs(exact.det(K))
    if backend == "float":
        return abs(float(np.linalg.det(np.array(K, dtype=float))))
    raise ValueError(f"unknown backend {backend!r}")


def count_matchings(g: DimerGraph, keep: Iterable[int] | None = None) -> int:
    """Brute-force perfect matching count (small graphs only)."""
    blacks, whites = _restricted_vertices(g, keep)
    if len(blacks) != len(whites):
        return 0
    wset = set(whites)
    nbrs: dict[int, list[int]] = {b: [] for b in blacks}
    for b, w, _ in g.edges:
        if b in nbrs and w in wset:
            nbrs[b].append(w)

    def rec(i: int, used: frozenset) -> int:
        if i == len(blacks):
            return 1
        return sum(rec(i + 1, used | {w}) for w in nbrs[blacks[i]] if w not in used)

    return rec(0, frozenset())


def log_dimer_partition(g: DimerGraph, keep: Iterable[int] | None = None) -> float:
    """log of the matching count via a floating slogdet; -inf when there is no matching."""
    K, blacks, whites = kasteleyn_matrix(g, keep)
    if len(blacks) != len(whites):
        return -math.inf
    if not blacks:
        return 0.0
    sign, logdet = np.linalg.slogdet(np.array(K, dtype=float))
    return float(logdet) if sign != 0 else -math.inf


def grid_partition_log(g: DimerGraph) -> float:
    """log Z_D for the bare grid (all pendant vertices removed)."""
    bare = DimerGraph(g.width, g.height, g.signature, g.anchors, g.S)
    grid = set(range(g.width * g.height))
    bare.color = {v: c for v, c in g.color.items() if v in grid}
    bare.pos = {v: p for v, p in g.pos.items() if v in grid}
    bare.edges = [e for e in g.edges if e[0] in grid and e[1] in grid]
    return log_dimer_partition(bare)


def z_tableau(T: Filling, g: DimerGraph, backend: str = "exact", cache: dict | None = None) -> Number:
    """Product over the three rows a of the partition function keeping the points in row a.

    The exact backend returns the integer Z(e_T).  The float backend returns
    Z(e_T) / Z_D^3 with Z_D the bare-grid partition function, which stays
    finite on large grids; probabilities are unaffected by that scale.
    """
    cache = {} if cache is None else cache
    if backend == "float":
        if "grid" not in cache:
            cache["grid"] = grid_partition_log(g)
        total = 0.0
        for a in (1, 2, 3):
            key = frozenset(row_content(T, a))
            if key not in cache:
                cache[key] = log_dimer_partition(g, key)
            total += cache[key] - cache["grid"]
        return math.exp(total) if total > -math.inf else 0.0
    value: Number = 1
    for a in (1, 2, 3):
        key = frozenset(row_content(T, a))
        if key not in cache:
            cache[key] = dimer_partition(g, key, backend)
        value *= cache[key]
        if not value:
            return 0
    return value


# -- multiweb oracle ----------------------------------------------------------------------

def enumerate_multiwebs(g: DimerGraph, max_edges: int = 18):
    """Yield edge multiplicity tuples (aligned with g.edges) with the prescribed vertex sums."""
    if len(g.edges) > max_edges:
        raise TooLarge(f"{len(g.edges)} edges exceeds the oracle budget of {max_edges}")
    need = {v: 3 for v in g.color}
    for v, s in zip(g.boundary, g.signature.s):
        need[v] = s
    left = {v: 0 for v in g.color}
    for b, w, _ in g.edges:
        left[b] += 1
        left[w] += 1
    mult = [0] * len(g.edges)

    def rec(e: int):
        if e == len(g.edges):
            if all(r == 0 for r in need.values()):
                yield tuple(mult)
            return
        b, w, _ = g.edges[e]
        left[b] -= 1
        left[w] -= 1
        hi = min(need[b], need[w])
        for m in range(hi + 1):
            if left[b] == 0 and m != need[b]:
                continue
            if left[w] == 0 and m != need[w]:
                continue
            need[b] -= m
            need[w] -= m
            mult[e] = m
            yield from rec(e + 1)
            need[b] += m
            need[w] += m
        mult[e] = 0
        left[b] += 1
        left[w] += 1

    yield from rec(0)


def multiweb_to_web(g: DimerGraph, mult: Sequence[int]) -> W.Web:
    """Drop 3-edges, orient 1-edges black to white and 2-edges white to black, smooth 2-valent vertices."""
    inc: dict[int, list[tuple[float, int, bool]]] = {v: [] for v in g.color}
    ends: dict[int, tuple[int, int]] = {}
    for idx, ((b, w, _), m) in enumerate(zip(g.edges, mult)):
        if m not in (1, 2):
            continue
        tail, head = (b, w) if m == 1 else (w, b)
        ends[idx] = (tail, head)
        for v, other in ((tail, head), (head, tail)):
            (x0, y0), (x1, y1) = g.pos[v], g.pos[other]
            inc[v].append((math.atan2(y1 - y0, x1 - x0), idx, v == tail))
    bset = set(g.boundary)
    keep = [v for v in g.color if v in bset or len(inc[v]) == 3]
    web = W.Web()
    vid: dict[int, int] = {}
    for v in g.boundary:
        vid[v] = web.add_boundary("h", g.signature.s[g.boundary.index(v)])
    for v in keep:
        if v not in bset:
            vid[v] = web.add_vertex()
    half: dict[tuple[int, int], int] = {}
    for v in keep:
        for _, idx, _ in sorted(inc[v]):
            h = web.new_half_edge(vid[v])
            web.rot[vid[v]].append(h)
            half[(v, idx)] = h
    used: set[int] = set()

    def walk(v: int, idx: int) -> tuple[int, int]:
        # follow the strand through 2-valent vertices; returns the far (vertex, edge)
        while True:
            used.add(idx)
            tail, head = ends[idx]
            u = head if v == tail else tail
            if u in vid:
                return u, idx
            nxt = [j for _, j, _ in inc[u] if j != idx]
            v, idx = u, nxt[0]

    for (v, idx), h in list(half.items()):
        if idx in used and h in web.twin:
            continue
        if h in web.twin:
            continue
        u, last = walk(v, idx)
        tail, _ = ends[idx]
        web.join(h, half[(u, last)], tail == v)
    # strands never meeting a kept vertex are closed loops
    seen = set(used)
    for idx in ends:
        if idx in seen:
            continue
        web.loops += 1
        v = ends[idx][0]
        start = idx
        while True:
            seen.add(idx)
            tail, head = ends[idx]
            u = head if v == tail else tail
            nxt = [j for _, j, _ in inc[u] if j != idx]
            v, idx = u, nxt[0]
            if idx == start:
                break
    return web


def multiweb_oracle(g: DimerGraph, max_edges: int = 18) -> dict[int, Fraction]:
    """Coefficients C_lambda (indexed by reduced basis position) from explicit enumeration."""
    cob = W.matrix_M(g.signature)
    index = {k: i for i, k in enumerate(cob.basis.keys)}
    out: dict[int, Fraction] = {}
    for mult in enumerate_multiwebs(g, max_edges):
        web = multiweb_to_web(g, mult)
        for c, rw in W.reduce(web).webs():
            i = index[W.canonical_key(rw)]
            out[i] = out.get(i, 0) + c
    return {i: Fraction(c) for i, c in sorted(out.items()) if c}


# -- finite-size probabilities -------------------------------------------------------------

@dataclass
class ConnectionReport:
    signature: Signature
    reference: int                  # 1-based tableau index
    coefficients: list[Number]      # C_lambda
    probabilities: list[Number]     # Pr_lambda^T
    limits: list[Fraction] | None = None

    def relative_errors(self) -> list[float] | None:
        if self.limits is None:
            return None
        return [abs(float(p) - float(q)) / abs(float(q)) if q else abs(float(p))
                for p, q in zip(self.probabilities, self.limits)]


def finite_connection_probabilities(sig: Signature, g: DimerGraph, reference: int | None = None,
                                    backend: str = "exact") -> ConnectionReport:
    cob = W.matrix_M(sig)
    tabs = cob.tableaux
    reference = len(tabs) if reference is None else reference
    cache: dict = {}
    Z = [z_tableau(U, g, backend, cache) for U in tabs]
    if backend == "float":
        C = [sum(float(cob.M_inv[lam][u]) * Z[u] for u in range(len(tabs))) for lam in range(len(tabs))]
    else:
        C = [sum(cob.M_inv[lam][u] * Z[u] for u in range(len(tabs))) for lam in range(len(tabs))]
    zt = Z[reference - 1]
    if not zt:
        raise ZeroPartition(f"Z(e_T) vanishes for reference tableau {reference}")
    row = cob.M[reference - 1]
    probs = [C[lam] * row[lam] / zt if backend == "float" else Fraction(C[lam] * row[lam]) / zt
             for lam in range(len(tabs))]
    return ConnectionReport(sig, reference, C, probs)


# -- scaling limit ----------------------------------------------------------------------------

def _check_points(x: Sequence) -> list[Fraction]:
    pts = [Fraction(v) for v in x]
    if len(set(pts)) != len(pts):
        raise CollidingPoints("marked points must be distinct")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise CollidingPoints("marked points must be strictly increasing")
    return pts


def _tableau(sig: Signature, T: int | Filling) -> tuple[int, Filling]:
    tabs = W.matrix_M(sig).tableaux
    if isinstance(T, Filling):
        return tabs.index(T) + 1, T
    return T, tabs[T - 1]


def limit_probability(lam: int, T: int | Filling, x: Sequence, sig: Signature) -> Fraction:
    """Scaling limit of Pr_lambda^T at marked points x (exact rational)."""
    pts = _check_points(x)
    if len(pts) != sig.d:
        raise CollidingPoints(f"expected {sig.d} points, got {len(pts)}")
    cob = W.matrix_M(sig)
    t_index, Tf = _tableau(sig, T)
    mtl = cob.M[t_index - 1][lam - 1]
    if not mtl:
        return Fraction(0)
    pure = sum((cob.M_inv[lam - 1][u] * specht(U.transpose(), sig.d).evaluate(pts)
                for u, U in enumerate(cob.tableaux)), Fraction(0))
    return Fraction(mtl) * pure / specht(Tf.transpose(), sig.d).evaluate(pts)


def limit_probability_function(lam: int, T: int | Filling, sig: Signature) -> tuple[SparsePolynomial, SparsePolynomial]:
    """Numerator and denominator polynomials of the scaling limit (common prefactor removed)."""
    cob = W.matrix_M(sig)
    t_index, Tf = _tableau(sig, T)
    num = SparsePolynomial.zero(sig.d)
    for u, U in enumerate(cob.tableaux):
        c = cob.M_inv[lam - 1][u]
        if c:
            num = num + specht(U.transpose(), sig.d) * c
    return num * cob.M[t_index - 1][lam - 1], specht(Tf.transpose(), sig.d)


def pure_partition_polynomial(lam: int, sig: Signature) -> SparsePolynomial:
    """sum_U Minv[lam, U] * specht(U^t): the pure partition function without its prefactor."""
    cob = W.matrix_M(sig)
    out = SparsePolynomial.zero(sig.d)
    for u, U in enumerate(cob.tableaux):
        c = cob.M_inv[lam - 1][u]
        if c:
            out = out + specht(U.transpose(), sig.d) * c
    return out


def cauchy_index_sets(T: Filling, a: int, sig: Signature, S: Sequence[int] | None = None) -> tuple[list[int], list[int]]:
    S = set(distinguished_indices(sig) if S is None else S)
    Ca = set(row_content(T, a))
    rows = [i for i in range(1, sig.d + 1) if i in Ca and i not in S]
    cols = [j for j in range(1, sig.d + 1) if j not in Ca and j in S]
    if len(rows) != len(cols):
        raise NonSquareIndexSet(f"{len(rows)} rows against {len(cols)} columns")
    return rows, cols


def cauchy_limit_ratio(T: Filling, a: int, sig: Signature, x: Sequence, S: Sequence[int] | None = None) -> Fraction:
    """|det(1/(x_j - x_i))| over rows i in C_a \\ S and columns j in S \\ C_a."""
    pts = _check_points(x)
    rows, cols = cauchy_index_sets(T, a, sig, S)
    if not rows:
        return Fraction(1)
    mat = [[1 / (pts[j - 1] - pts[i - 1]) for j in cols] for i in rows]
    return abs(Fraction(exact.det(mat)))


def cauchy_product(T: Filling, a: int, sig: Signature, x: Sequence, S: Sequence[int] | None = None) -> Fraction:
    """The same magnitude from the closed Cauchy product formula."""
    pts = _check_points(x)
    rows, cols = cauchy_index_sets(T, a, sig, S)
    value = Fraction(1)
    for p, q in itertools.combinations(rows, 2):
        value *= pts[q - 1] - pts[p - 1]
    for p, q in itertools.combinations(cols, 2):
        value *= pts[q - 1] - pts[p - 1]
    for i in rows:
        for j in cols:
            value /= pts[j - 1] - pts[i - 1]
    return abs(value)


# -- convergence study ---------------------------------------------------------------------------

@dataclass
class StudyRow:
    size: int
    lam: int
    finite_pr: float
    limit_p: float
    rel_err: float


def place_anchors(sig: Signature, width: int, fractions: Sequence[float], mode: str = "last_k") -> list[int]:
    """Columns near f * (width - 1) whose row-1 vertex has the colour the pendant needs."""
    S = set(distinguished_indices(sig, mode))
    cols: list[int] = []
    last = -1
    for i, f in enumerate(fractions, start=1):
        c = int(round(f * (width - 1)))
        if (c % 2 == 1) != (i in S):     # row-1 vertex at column c is black iff c is odd
            c += 1
        while c <= last:
            c += 2
        cols.append(c)
        last = c
    if cols and cols[-1] > width - 1:
        raise AnchorsOutOfRange(f"width {width} too small for {len(cols)} anchors")
    return cols


def boundary_coordinates(cols: Sequence[int], width: int, height: int) -> list[float]:
    """Images on the real line of bottom-side columns under the rectangle-to-half-plane map.

    The rectangle of width ``width`` and height ``height`` (lattice cells) is
    sent to the upper half-plane by the Jacobi sn map whose modulus matches
    the aspect ratio; the bottom side lands on [-1, 1].
    """
    from scipy.optimize import brentq
    from scipy.special import ellipj, ellipk

    aspect = height / width
    m = brentq(lambda t: ellipk(1 - t) / (2 * ellipk(t)) - aspect, 1e-15, 1 - 1e-15)
    K = ellipk(m)
    return [float(ellipj((c - (width - 1) / 2) * 2 * K / width, m)[0]) for c in cols]


def convergence_study(sig: Signature, reference: int | None, fractions: Sequence[float], sizes: Sequence[int],
                      aspect: float = 1.0, backend: str = "float", mode: str = "last_k") -> list[StudyRow]:
    """Finite probabilities on growing square-lattice rectangles against the scaling limit.

    A size N grid has width N and height round(aspect * N).  Anchors sit at
    the fractions of the bottom side; the limit is evaluated at their images
    under the rectangle-to-half-plane conformal map, which leaves the limit
    probabilities unchanged by conformal invariance.
    """
    if len(sizes) < 2:
        raise ValueError("a convergence study needs at least two sizes")
    rows: list[StudyRow] = []
    cob = W.matrix_M(sig)
    reference = len(cob.tableaux) if reference is None else reference
    for n in sizes:
        height = max(1, int(round(aspect * n)))
        anchors = place_anchors(sig, n, fractions, mode)
        g = build_graph(n, height, sig, anchors, mode)
        rep = finite_connection_probabilities(sig, g, reference, backend)
        x = [Fraction(v) for v in boundary_coordinates(anchors, n, height)]
        for lam in range(1, len(cob.tableaux) + 1):
            p = float(rep.probabilities[lam - 1])
            q = float(limit_probability(lam, reference, x, sig))
            err = abs(p - q) / abs(q) if q else abs(p)
            rows.append(StudyRow(n, lam, p, q, err))
    return rows


def errors_nonincreasing(rows: Sequence[StudyRow]) -> dict[int, bool]:
    """Per lambda: error at the largest size is at most the error at the smallest size."""
    out = {}
    for lam in sorted({r.lam for r in rows}):
        mine = sorted((r for r in rows if r.lam == lam), key=lambda r: r.size)
        out[lam] = mine[-1].rel_err <= mine[0].rel_err + 1e-12
    return out


def study_to_csv(rows: Sequence[StudyRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "lambda", "finite_pr", "limit_p", "rel_err"])
    for r in rows:
        w.writerow([r.size, r.lam, f"{r.finite_pr:.12g}", f"{r.limit_p:.12g}", f"{r.rel_err:.6g}"])
    return buf.getvalue()
