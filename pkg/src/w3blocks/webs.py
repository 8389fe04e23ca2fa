"""sl3 webs as planar half-edge maps, Kuperberg reduction, and tensor evaluation.

A web lives in a disk whose boundary carries marked univalent vertices in
counterclockwise order.  Half-plane webs list their points 1..d left to
right; strip webs list the bottom points 1..d left to right followed by
the top points d..1.  Interior vertices are trivalent sources or sinks.

Reduction rules (applied to faces not touching the boundary):
closed loop -> 3, digon -> 2 x (strand), square -> sum of the two
resolutions joining adjacent external legs.
"""
from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import exact
from .combinatorics import Filling, Signature, TableauKind, enumerate_tableaux, row_number_tuples
from .errors import (BoundaryMismatch, ContentMismatch, HarvestIncomplete, IndexOutOfRange, NonPlanar,
                     SingularM)

Number = int | Fraction

LOOP_VALUE = 3
DIGON_VALUE = 2


class Web:
    """Mutable half-edge map; treat instances as values once built.

    ``boundary`` is the ccw list of boundary vertex ids, ``sides`` names the
    boundary line of each point ('h' half-plane, 'b' strip bottom, 't' strip
    top) and ``types`` its valence s in {1, 2}.
    """

    __slots__ = ("vert", "twin", "rot", "out", "kind", "boundary", "sides", "types", "loops", "_next_id")

    def __init__(self):
        self.vert: dict[int, int] = {}       # half-edge -> vertex
        self.twin: dict[int, int] = {}       # half-edge -> opposite half-edge
        self.out: dict[int, bool] = {}       # edge points away from vert[h]
        self.rot: dict[int, list[int]] = {}  # vertex -> ccw list of half-edges
        self.kind: dict[int, str] = {}       # vertex -> 'boundary' | 'internal'
        self.boundary: list[int] = []
        self.sides: list[str] = []
        self.types: list[int] = []
        self.loops = 0                       # closed strands without vertices
        self._next_id = 0

    # -- construction ------------------------------------------------------------
    def _new(self) -> int:
        self._next_id += 1
        return self._next_id

    def add_vertex(self, kind: str = "internal") -> int:
        v = self._new()
        self.kind[v] = kind
        self.rot[v] = []
        return v

    def add_boundary(self, side: str, s: int) -> int:
        v = self.add_vertex("boundary")
        self.boundary.append(v)
        self.sides.append(side)
        self.types.append(s)
        return v

    def new_half_edge(self, v: int) -> int:
        h = self._new()
        self.vert[h] = v
        return h

    def join(self, h1: int, h2: int, h1_out: bool) -> None:
        self.twin[h1], self.twin[h2] = h2, h1
        self.out[h1], self.out[h2] = h1_out, not h1_out

    def connect(self, u: int, v: int) -> tuple[int, int]:
        """Edge u -> v; half-edges are appended to the rotation lists."""
        hu, hv = self.new_half_edge(u), self.new_half_edge(v)
        self.rot[u].append(hu)
        self.rot[v].append(hv)
        self.join(hu, hv, True)
        return hu, hv

    def copy(self) -> "Web":
        w = Web()
        w.vert = dict(self.vert)
        w.twin = dict(self.twin)
        w.out = dict(self.out)
        w.rot = {v: list(r) for v, r in self.rot.items()}
        w.kind = dict(self.kind)
        w.boundary = list(self.boundary)
        w.sides = list(self.sides)
        w.types = list(self.types)
        w.loops = self.loops
        w._next_id = self._next_id
        return w

    def remove_vertex(self, v: int) -> None:
        for h in self.rot.pop(v):
            del self.vert[h]
            self.twin.pop(h, None)
            self.out.pop(h, None)
        del self.kind[v]

    def internal_vertices(self) -> list[int]:
        return [v for v, k in self.kind.items() if k == "internal"]

    @property
    def d(self) -> int:
        return len(self.boundary)

    def n_edges(self) -> int:
        return len(self.twin) // 2

    def boundary_half_edge(self, i: int) -> int:
        """Real half-edge at boundary position i (0-based)."""
        return self.rot[self.boundary[i]][0]

    def next_ccw(self, h: int) -> int:
        r = self.rot[self.vert[h]]
        return r[(r.index(h) + 1) % len(r)]

    # -- faces -------------------------------------------------------------------
    def _augmented(self):
        """Rotation and twin maps with the boundary circle added as virtual edges."""
        twin = dict(self.twin)
        nxt: dict = {}
        vert = dict(self.vert)
        for v, r in self.rot.items():
            if self.kind[v] == "internal":
                for a, b in zip(r, r[1:] + r[:1]):
                    nxt[a] = b
        d = self.d
        for i, b in enumerate(self.boundary):
            real = self.rot[b][0]
            vn, vp = ("n", i), ("p", i)
            vert[vn] = vert[vp] = b
            # at a boundary point: towards next point, then into the disk, then towards previous point
            nxt[vn], nxt[real], nxt[vp] = real, vp, vn
            twin[vn] = ("p", (i + 1) % d)
            twin[("p", (i + 1) % d)] = vn
        return twin, nxt, vert

    def faces(self) -> list[list]:
        """Orbits of h -> next_ccw(twin(h)) on the augmented map."""
        twin, nxt, _ = self._augmented()
        seen, out = set(), []
        for h in twin:
            if h in seen:
                continue
            orbit, x = [], h
            while x not in seen:
                seen.add(x)
                orbit.append(x)
                x = nxt[twin[x]]
            out.append(orbit)
        return out

    def internal_faces(self) -> list[list[int]]:
        return [f for f in self.faces() if all(isinstance(h, int) for h in f)
                and all(self.kind[self.vert[h]] == "internal" for h in f)]

    def components(self) -> list[set[int]]:
        """Vertex sets of connected components; boundary points are linked through the circle."""
        adj: dict[int, set[int]] = {v: set() for v in self.kind}
        for h, t in self.twin.items():
            adj[self.vert[h]].add(self.vert[t])
        for a, b in zip(self.boundary, self.boundary[1:]):
            adj[a].add(b)
            adj[b].add(a)
        seen, comps = set(), []
        for v in self.kind:
            if v in seen:
                continue
            comp, queue = set(), [v]
            while queue:
                x = queue.pop()
                if x in comp:
                    continue
                comp.add(x)
                queue.extend(adj[x] - comp)
            seen |= comp
            comps.append(comp)
        return comps

    def is_planar(self) -> bool:
        twin, _, vert = self._augmented()
        V = len(self.kind)
        E = len(twin) // 2
        F = len(self.faces())
        C = len(self.components())
        return V - E + F == 2 * C

    def __repr__(self):
        return f"Web(d={self.d}, internal={len(self.internal_vertices())}, edges={self.n_edges()})"


# -- validation -------------------------------------------------------------------

def boundary_points_out(side: str, s: int) -> bool:
    """Whether the leg at a boundary point is directed away from that point."""
    if side in ("h", "b"):
        return s == 1
    return s == 2


def validate(w: Web) -> tuple[bool, str]:
    """Structural check; returns (ok, diagnostic)."""
    for h, t in w.twin.items():
        if w.twin.get(t) != h:
            return False, f"twin map is not an involution at {h}"
        if w.out[h] == w.out[t]:
            return False, f"edge {h}-{t} has inconsistent orientation"
    for v, r in w.rot.items():
        if any(w.vert.get(h) != v for h in r):
            return False, f"rotation of {v} lists foreign half-edges"
        if any(h not in w.twin for h in r):
            return False, f"vertex {v} has a dangling half-edge"
        if w.kind[v] == "internal":
            if len(r) != 3:
                return False, f"internal vertex {v} has degree {len(r)}"
            flags = {w.out[h] for h in r}
            if len(flags) != 1:
                return False, f"internal vertex {v} is neither source nor sink"
    for i, b in enumerate(w.boundary):
        r = w.rot[b]
        if len(r) != 1:
            return False, f"boundary point {i + 1} has degree {len(r)}"
        if w.out[r[0]] != boundary_points_out(w.sides[i], w.types[i]):
            return False, f"boundary point {i + 1} has the wrong leg orientation"
    if not w.is_planar():
        return False, "Euler characteristic check failed"
    return True, "ok"


# -- splicing ---------------------------------------------------------------------

def splice(w: Web, removed: Iterable[int], pairs: Sequence[tuple[int, int]]) -> int:
    """Delete ``removed`` vertices and reconnect through the port pairing.

    Each port is a half-edge at a removed vertex whose strand must survive;
    ``pairs`` says which ports are joined.  Chains through several removed
    vertices are followed; closed chains become loops, whose number is
    returned.  Modifies ``w`` in place.
    """
    removed = set(removed)
    mate: dict[int, int] = {}
    for a, b in pairs:
        mate[a], mate[b] = b, a
    visited: set[int] = set()
    joins = []
    for p in mate:
        if p in visited:
            continue
        t = w.twin[p]
        if w.vert[t] in removed:
            continue
        # walk from the surviving half-edge t through the ports
        start_out = w.out[t]
        x = p
        while True:
            visited.add(x)
            q = mate[x]
            visited.add(q)
            u = w.twin[q]
            if w.vert[u] not in removed:
                joins.append((t, u, start_out))
                break
            x = u
    loops = 0
    for p in mate:
        if p in visited:
            continue
        x = p
        while x not in visited:
            visited.add(x)
            q = mate[x]
            visited.add(q)
            x = w.twin[q]
        loops += 1
    for v in removed:
        for h in w.rot[v]:
            if h not in mate and w.vert[w.twin[h]] not in removed:
                raise ValueError("non-port half-edge leaves the removed region")
    for v in removed:
        w.remove_vertex(v)
    for t, u, t_out in joins:
        if w.out[u] == t_out:
            raise ValueError("splice would create an inconsistently oriented edge")
        w.join(t, u, t_out)
    return loops


# -- canonical form -------------------------------------------------------------------

def canonical_key(w: Web) -> tuple:
    """Isotopy invariant of a web all of whose components touch the boundary.

    Breadth-first traversal from boundary point 1 along rotations; each
    vertex records its kind and, starting from the half-edge it was reached
    by, the discovery index of each neighbour and the edge direction.
    """
    if not w.boundary:
        if w.kind:
            raise ValueError("closed components must be evaluated before keying")
        return ("empty", w.loops)
    twin, nxt, vert = w._augmented()
    order: dict[int, int] = {}
    entry: dict[int, object] = {}
    b0 = w.boundary[0]
    order[b0] = 0
    entry[b0] = ("n", 0)
    queue = deque([b0])
    code = []
    pos_of = {b: i for i, b in enumerate(w.boundary)}
    while queue:
        v = queue.popleft()
        h = entry[v]
        start = h
        row = []
        while True:
            u = vert[twin[h]]
            if u not in order:
                order[u] = len(order)
                entry[u] = twin[h]
                queue.append(u)
            row.append((order[u], w.out.get(h) if isinstance(h, int) else None))
            h = nxt[h]
            if h == start:
                break
        tag = ("B", pos_of[v], w.sides[pos_of[v]], w.types[pos_of[v]]) if v in pos_of else ("I",)
        code.append((tag, tuple(row)))
    if len(order) != len(w.kind):
        raise ValueError("web has components not attached to the boundary")
    return (("loops", w.loops),) + tuple(code)


# -- web sums ------------------------------------------------------------------------

class WebSum:
    """Linear combination of webs keyed by canonical form."""

    def __init__(self, terms: Mapping[tuple, tuple[Number, Web]] | None = None):
        self.terms: dict[tuple, list] = {}
        for k, (c, w) in (terms or {}).items():
            if c:
                self.terms[k] = [c, w]

    @classmethod
    def of(cls, w: Web, c: Number = 1) -> "WebSum":
        ws = cls()
        ws.add(w, c)
        return ws

    def add(self, w: Web, c: Number = 1, key: tuple | None = None) -> None:
        if not c:
            return
        key = canonical_key(w) if key is None else key
        if key in self.terms:
            self.terms[key][0] += c
            if not self.terms[key][0]:
                del self.terms[key]
        else:
            self.terms[key] = [c, w]

    def __add__(self, other: "WebSum") -> "WebSum":
        out = self.scale(1)
        for k, (c, w) in other.terms.items():
            out.add(w, c, k)
        return out

    def __sub__(self, other: "WebSum") -> "WebSum":
        return self + other.scale(-1)

    def scale(self, c: Number) -> "WebSum":
        out = WebSum()
        for k, (a, w) in self.terms.items():
            out.add(w, a * c, k)
        return out

    def coefficients(self) -> dict[tuple, Number]:
        return {k: c for k, (c, _) in self.terms.items()}

    def __eq__(self, other):
        return isinstance(other, WebSum) and self.coefficients() == other.coefficients()

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def webs(self) -> list[tuple[Number, Web]]:
        return [(c, w) for _, (c, w) in sorted(self.terms.items(), key=lambda t: repr(t[0]))]


# -- reduction ----------------------------------------------------------------------

def _extract(w: Web, comp: set[int]) -> Web:
    sub = Web()
    sub._next_id = w._next_id
    for v in comp:
        sub.kind[v] = w.kind[v]
        sub.rot[v] = list(w.rot[v])
        for h in w.rot[v]:
            sub.vert[h] = v
            sub.twin[h] = w.twin[h]
            sub.out[h] = w.out[h]
    return sub


def _split_closed(w: Web) -> tuple[Web, list[Web]]:
    """Detach components that do not reach the boundary."""
    closed = []
    bset = set(w.boundary)
    for comp in w.components():
        if not comp & bset:
            closed.append(_extract(w, comp))
            for v in comp:
                w.remove_vertex(v)
    return w, closed


def _rewrite(w: Web, face: list[int]) -> list[tuple[Number, Web]]:
    """Apply the digon or square rule on an internal face."""
    vs = [w.vert[h] for h in face]
    if len(face) == 2:
        nw = w.copy()
        u, v = vs
        pu = next(h for h in nw.rot[u] if h not in face and nw.twin[h] not in face)
        pv = next(h for h in nw.rot[v] if h not in face and nw.twin[h] not in face)
        loops = splice(nw, {u, v}, [(pu, pv)])
        return [(DIGON_VALUE * LOOP_VALUE ** loops, nw)]
    if len(face) == 4:
        face_half = set(face) | {w.twin[h] for h in face}
        ports = [next(h for h in w.rot[v] if h not in face_half) for v in vs]
        out = []
        for pairing in (((0, 1), (2, 3)), ((1, 2), (3, 0))):
            nw = w.copy()
            loops = splice(nw, set(vs), [(ports[a], ports[b]) for a, b in pairing])
            out.append((LOOP_VALUE ** loops, nw))
        return out
    raise ValueError(f"face of degree {len(face)} is not reducible")


def _reducible_faces(w: Web) -> list[list[int]]:
    return [f for f in w.internal_faces() if len(f) in (2, 4)]


def _reduce_web(w: Web, rng: random.Random | None, memo: dict) -> dict[tuple, list]:
    """Reduced expansion of a single web: key -> [coefficient, web]."""
    w = w.copy()
    w, closed = _split_closed(w)
    scalar: Number = LOOP_VALUE ** w.loops
    w.loops = 0
    for c in closed:
        scalar *= closed_value(c, rng, memo)
        if not scalar:
            return {}
    key = canonical_key(w)
    if rng is None and key in memo:
        base = memo[key]
    else:
        faces = _reducible_faces(w)
        if not faces:
            base = {key: [1, w]}
        else:
            face = rng.choice(faces) if rng else faces[0]
            base = {}
            for coeff, nw in _rewrite(w, face):
                for k, (c, ww) in _reduce_web(nw, rng, memo).items():
                    if k in base:
                        base[k][0] += coeff * c
                    else:
                        base[k] = [coeff * c, ww]
            base = {k: v for k, v in base.items() if v[0]}
        if rng is None:
            memo[key] = base
    return {k: [c * scalar, ww] for k, (c, ww) in base.items()}


def closed_value(w: Web, rng: random.Random | None = None, memo: dict | None = None) -> Number:
    """Scalar value of a closed web (no boundary)."""
    memo = {} if memo is None else memo
    if w.loops:
        rest = w.copy()
        rest.loops = 0
        return LOOP_VALUE ** w.loops * closed_value(rest, rng, memo)
    if not w.kind:
        return 1
    comps = w.components()
    if len(comps) > 1:
        value: Number = 1
        for comp in comps:
            value *= closed_value(_extract(w, comp), rng, memo)
        return value
    faces = [f for f in w.faces() if len(f) in (2, 4)]
    if not faces:
        raise NonPlanar("closed web without a reducible face")
    face = rng.choice(faces) if rng else faces[0]
    total: Number = 0
    for coeff, nw in _rewrite(w, face):
        total += coeff * closed_value(nw, rng, memo)
    return total


_MEMO: dict = {}


def reduce(ws: WebSum | Web, seed: int | None = None) -> WebSum:
    """Reduce to a combination of non-elliptic webs.

    With ``seed`` the rewrite order is randomized (for confluence tests);
    otherwise the first reducible face is used and results are memoized.
    """
    items = [(1, ws)] if isinstance(ws, Web) else [(c, w) for c, w in ws.terms.values()]
    rng = random.Random(seed) if seed is not None else None
    memo = _MEMO if rng is None else {}
    out = WebSum()
    for c, w in items:
        if not w.is_planar():
            raise NonPlanar("face tracing failed the Euler check")
        for rk, (rc, rw) in _reduce_web(w, rng, memo).items():
            out.add(rw, c * rc, rk)
    return out


def is_reduced(w: Web) -> bool:
    w2, closed = _split_closed(w.copy())
    return not closed and not w.loops and not _reducible_faces(w2)


# -- strip algebra -------------------------------------------------------------------

def identity_strip(types: Sequence[int]) -> Web:
    """Vertical strands joining bottom point i to top point i."""
    w = Web()
    bottoms = [w.add_boundary("b", s) for s in types]
    tops_rev = [w.add_boundary("t", s) for s in reversed(types)]
    tops = tops_rev[::-1]
    for i, s in enumerate(types):
        if s == 1:
            w.connect(bottoms[i], tops[i])
        else:
            w.connect(tops[i], bottoms[i])
    return w


def _strip_points(w: Web) -> tuple[list[int], list[int]]:
    bottoms = [b for b, side in zip(w.boundary, w.sides) if side == "b"]
    tops = [b for b, side in zip(w.boundary, w.sides) if side == "t"][::-1]
    return bottoms, tops


def h_web(i: int, n: int, types: Sequence[int] | None = None) -> Web:
    """Strip web with strands i, i+1 fused through an H; other strands vertical.

    Defaults to types (1^n).  The two fused points must share a type; for
    type 1 the lower vertex is a sink, for type 2 every H edge is reversed.
    """
    types = [1] * n if types is None else list(types)
    if len(types) != n:
        raise BoundaryMismatch("types must have one entry per strand")
    if not 1 <= i <= n - 1:
        raise IndexOutOfRange(f"generator index {i} outside 1..{n - 1}")
    if types[i - 1] != types[i]:
        raise BoundaryMismatch("an H joins two points of the same type")
    w = identity_strip([1 if k in (i - 1, i) else s for k, s in enumerate(types)])
    bottoms, tops = _strip_points(w)
    # drop the two vertical strands that get fused
    for k in (i - 1, i):
        hb = w.rot[bottoms[k]].pop()
        ht = w.twin[hb]
        w.rot[tops[k]].remove(ht)
        for h in (hb, ht):
            del w.vert[h], w.twin[h], w.out[h]
    lower, upper = w.add_vertex(), w.add_vertex()
    # lower vertex: ccw order right leg, middle edge, left leg
    _, hl_r = _half_edges(w, bottoms[i], lower)
    hu_m, hl_m = _half_edges(w, upper, lower)
    _, hl_l = _half_edges(w, bottoms[i - 1], lower)
    w.rot[lower] = [hl_r, hl_m, hl_l]
    # upper vertex: up-right, up-left, down
    hu_r, _ = _half_edges(w, upper, tops[i])
    hu_l, _ = _half_edges(w, upper, tops[i - 1])
    w.rot[upper] = [hu_r, hu_l, hu_m]
    if types[i - 1] == 2:
        for h in {*w.rot[lower], *w.rot[upper]}:
            w.out[h] = not w.out[h]
        for h in {w.twin[x] for x in w.rot[lower] + w.rot[upper]} - {*w.rot[lower], *w.rot[upper]}:
            w.out[h] = not w.out[h]
        for k in (i - 1, i):
            w.types[w.boundary.index(bottoms[k])] = 2
            w.types[w.boundary.index(tops[k])] = 2
    return w


def cup_cap_web(i: int, types: Sequence[int]) -> Web:
    """Strip web joining bottom points i, i+1 by an arc and top points i, i+1 by an arc."""
    n = len(types)
    if not 1 <= i <= n - 1:
        raise IndexOutOfRange(f"arc index {i} outside 1..{n - 1}")
    if types[i - 1] == types[i]:
        raise BoundaryMismatch("an arc joins points of different types")
    w = identity_strip(types)
    bottoms, tops = _strip_points(w)
    for k in (i - 1, i):
        hb = w.rot[bottoms[k]].pop()
        ht = w.twin[hb]
        w.rot[tops[k]].remove(ht)
        for h in (hb, ht):
            del w.vert[h], w.twin[h], w.out[h]
    lo, hi = (i - 1, i) if types[i - 1] == 1 else (i, i - 1)
    # bottom: the type-1 point emits; top: the type-2 point emits
    _half_edges(w, bottoms[lo], bottoms[hi])
    _half_edges(w, tops[hi], tops[lo])
    return w


def disjoint_union(w: Web, closed: Web) -> Web:
    """Place a web without boundary points inside w (its position is irrelevant)."""
    if closed.boundary:
        raise BoundaryMismatch("only closed webs can be added as separate components")
    out = w.copy()
    shift = out._next_id
    for v, k in closed.kind.items():
        out.kind[v + shift] = k
        out.rot[v + shift] = [h + shift for h in closed.rot[v]]
    for h, v in closed.vert.items():
        out.vert[h + shift] = v + shift
        out.twin[h + shift] = closed.twin[h] + shift
        out.out[h + shift] = closed.out[h]
    out._next_id = shift + closed._next_id
    out.loops += closed.loops
    return out


def theta_web() -> Web:
    """Closed web: a source and a sink joined by three parallel edges (value 6)."""
    w = Web()
    a, b = w.add_vertex(), w.add_vertex()
    pairs = [_half_edges(w, a, b) for _ in range(3)]
    w.rot[a] = [p[0] for p in pairs]
    w.rot[b] = [p[1] for p in reversed(pairs)]
    return w


def _half_edges(w: Web, u: int, v: int) -> tuple[int, int]:
    """Edge u -> v; boundary rotations are appended, internal ones set by the caller."""
    hu, hv = w.new_half_edge(u), w.new_half_edge(v)
    if w.kind[u] == "boundary":
        w.rot[u].append(hu)
    if w.kind[v] == "boundary":
        w.rot[v].append(hv)
    w.join(hu, hv, True)
    return hu, hv


def concatenate(w2: Web, w1: Web) -> Web:
    """Stack w2 on top of w1 (strip product w2 * w1)."""
    b1, t1 = _strip_points(w1)
    b2, t2 = _strip_points(w2)
    top_types = [w1.types[w1.boundary.index(v)] for v in t1]
    bottom_types = [w2.types[w2.boundary.index(v)] for v in b2]
    if top_types != bottom_types:
        raise BoundaryMismatch(f"top of lower web {top_types} != bottom of upper web {bottom_types}")
    w = w1.copy()
    shift = w._next_id
    for v, k in w2.kind.items():
        w.kind[v + shift] = k
        w.rot[v + shift] = [h + shift for h in w2.rot[v]]
    for h, v in w2.vert.items():
        w.vert[h + shift] = v + shift
        w.twin[h + shift] = w2.twin[h] + shift
        w.out[h + shift] = w2.out[h]
    w._next_id = shift + w2._next_id
    ports = [(w.rot[a][0], w.rot[b + shift][0]) for a, b in zip(t1, b2)]
    removed = set(t1) | {b + shift for b in b2}
    w.loops += w2.loops + splice(w, removed, ports)
    bottoms_types = [w1.types[w1.boundary.index(v)] for v in b1]
    tops_types = [w2.types[w2.boundary.index(v)] for v in t2]
    w.boundary = b1 + [v + shift for v in t2][::-1]
    w.sides = ["b"] * len(b1) + ["t"] * len(t2)
    w.types = bottoms_types + tops_types[::-1]
    return w


def act(x: Web, w: Web) -> Web:
    """Left action of a strip web on a half-plane web: the result keeps x's bottom points."""
    upper = w.copy()
    upper.sides = ["b"] * upper.d
    out = concatenate(upper, x)
    out.sides = ["h"] * out.d
    return out


def product(x: WebSum, y: WebSum) -> WebSum:
    """Bilinear stacking: x on top of y, then reduced."""
    out = WebSum()
    for _, (a, wa) in x.terms.items():
        for _, (b, wb) in y.terms.items():
            out = out + reduce(concatenate(wa, wb)).scale(a * b)
    return out


def tau_image(i: int, n: int) -> WebSum:
    """Image of the simple transposition: identity minus the H-web."""
    return WebSum.of(identity_strip([1] * n)) - WebSum.of(h_web(i, n))


def permutation_image(perm: Sequence[int]) -> WebSum:
    """Image of a permutation (1-based one-line) via a reduced word in the tau generators."""
    n = len(perm)
    word = []
    p = list(perm)
    # bubble sort records adjacent transpositions
    changed = True
    while changed:
        changed = False
        for i in range(n - 1):
            if p[i] > p[i + 1]:
                p[i], p[i + 1] = p[i + 1], p[i]
                word.append(i + 1)
                changed = True
    out = WebSum.of(identity_strip([1] * n))
    for i in reversed(word):
        out = product(tau_image(i, n), out)
    return out


# -- half-plane growth moves --------------------------------------------------------------

def empty_web() -> Web:
    return Web()


def _rebuild(w: Web, new_boundary: list[int], new_types: list[int]) -> None:
    w.boundary = new_boundary
    w.sides = ["h"] * len(new_boundary)
    w.types = new_types


def insert_cap(w: Web, pos: int, first_type: int) -> Web:
    """New adjacent points at positions pos, pos+1 joined by an arc."""
    nw = w.copy()
    a = nw.add_vertex("boundary")
    b = nw.add_vertex("boundary")
    ta, tb = first_type, 3 - first_type
    if ta == 1:
        _half_edges(nw, a, b)
    else:
        _half_edges(nw, b, a)
    _rebuild(nw, nw.boundary[:pos] + [a, b] + nw.boundary[pos:], w.types[:pos] + [ta, tb] + w.types[pos:])
    return nw


def expand_y(w: Web, pos: int) -> Web:
    """Replace the point at pos by a trivalent vertex carrying two points of the other type."""
    nw = w.copy()
    old = nw.boundary[pos]
    s = nw.types[pos]
    h_old = nw.rot[old][0]
    inner = nw.twin[h_old]
    v = nw.add_vertex()
    left = nw.add_vertex("boundary")
    right = nw.add_vertex("boundary")
    hv_in = nw.new_half_edge(v)
    nw.join(hv_in, inner, nw.out[h_old])
    nw.remove_vertex(old)
    new_type = 3 - s
    # the new legs are directed like a type-(3-s) point expects
    if new_type == 1:
        hl_b, hl_v = _half_edges(nw, left, v)
        hr_b, hr_v = _half_edges(nw, right, v)
    else:
        hl_v, hl_b = _half_edges(nw, v, left)
        hr_v, hr_b = _half_edges(nw, v, right)
    nw.rot[v] = [hv_in, hl_v, hr_v]
    _rebuild(nw, nw.boundary[:pos] + [left, right] + nw.boundary[pos + 1:],
             w.types[:pos] + [new_type, new_type] + w.types[pos + 1:])
    return nw


def apply_h(w: Web, pos: int) -> Web:
    """Swap the types at pos, pos+1 (which must differ) by attaching an H."""
    nw = w.copy()
    bl, br = nw.boundary[pos], nw.boundary[pos + 1]
    tl, tr = nw.types[pos], nw.types[pos + 1]
    if tl == tr:
        raise ValueError("H move needs points of different types")
    hl, hr = nw.rot[bl][0], nw.rot[br][0]
    x, y = nw.twin[hl], nw.twin[hr]
    A, B = nw.add_vertex(), nw.add_vertex()
    new_l = nw.add_vertex("boundary")
    new_r = nw.add_vertex("boundary")
    hA_x, hB_y = nw.new_half_edge(A), nw.new_half_edge(B)
    out_l, out_r = nw.out[hl], nw.out[hr]
    cap = x == hr
    nw.remove_vertex(bl)
    nw.remove_vertex(br)
    if cap:
        nw.join(hA_x, hB_y, out_l)
    else:
        nw.join(hA_x, x, out_l)
        nw.join(hB_y, y, out_r)
    # A keeps the orientation class of the old left leg
    if out_l:
        hA_B, hB_A = _half_edges(nw, A, B)
        hA_b, hb_A = _half_edges(nw, A, new_l)
        hb_B, hB_b = _half_edges(nw, new_r, B)
    else:
        hB_A, hA_B = _half_edges(nw, B, A)
        hb_A, hA_b = _half_edges(nw, new_l, A)
        hB_b, hb_B = _half_edges(nw, B, new_r)
    nw.rot[A] = [hA_B, hA_x, hA_b]
    nw.rot[B] = [hB_y, hB_A, hB_b]
    _rebuild(nw, nw.boundary[:pos] + [new_l, new_r] + nw.boundary[pos + 2:],
             w.types[:pos] + [tr, tl] + w.types[pos + 2:])
    return nw


def rotate(w: Web, k: int = 1) -> Web:
    """Cyclically relabel boundary points (position k becomes position 0)."""
    nw = w.copy()
    k %= max(1, w.d)
    nw.boundary = w.boundary[k:] + w.boundary[:k]
    nw.sides = w.sides[k:] + w.sides[:k]
    nw.types = w.types[k:] + w.types[:k]
    return nw


_HARVEST: dict[tuple[int, int], dict[tuple[int, ...], dict[tuple, Web]]] = {}


def _class_webs(d: int, ones: int, budget: int) -> dict[tuple[int, ...], dict[tuple, Web]]:
    """All non-elliptic half-plane webs for every arrangement of ``ones`` 1s among d points."""
    key = (d, ones)
    if key in _HARVEST:
        return _HARVEST[key]
    twos = d - ones
    found: dict[tuple[int, ...], dict[tuple, Web]] = {}
    if (ones + 2 * twos) % 3:
        _HARVEST[key] = found
        return found
    queue: list[Web] = []

    def offer(w: Web) -> None:
        if not is_reduced(w):
            return
        sig = tuple(w.types)
        k = canonical_key(w)
        bucket = found.setdefault(sig, {})
        if k not in bucket:
            if sum(len(b) for b in found.values()) > budget:
                raise HarvestIncomplete("generation budget exhausted")
            bucket[k] = w
            queue.append(w)

    if d == 0:
        offer(empty_web())
    else:
        # caps: remove an adjacent (1,2) or (2,1) pair
        if ones >= 1 and twos >= 1 and d >= 2:
            for sig, webs in _class_webs(d - 2, ones - 1, budget).items():
                for w in webs.values():
                    for pos in range(d - 1):
                        for first in (1, 2):
                            offer(insert_cap(w, pos, first))
        # Y: a 2 becomes (1,1), or a 1 becomes (2,2)
        if ones >= 2 and d >= 2:
            for w in _class_webs(d - 1, ones - 2, budget).get_all() if False else _flat(_class_webs(d - 1, ones - 2, budget)):
                for pos, s in enumerate(w.types):
                    if s == 2:
                        offer(expand_y(w, pos))
        if twos >= 2 and d >= 2:
            for w in _flat(_class_webs(d - 1, ones + 1, budget)):
                for pos, s in enumerate(w.types):
                    if s == 1:
                        offer(expand_y(w, pos))
    # closure under rotation and H moves within the class
    while queue:
        w = queue.pop()
        offer(rotate(w, 1))
        for pos in range(w.d - 1):
            if w.types[pos] != w.types[pos + 1]:
                offer(apply_h(w, pos))
    _HARVEST[key] = found
    return found


def _flat(by_sig: dict) -> list[Web]:
    return [w for webs in by_sig.values() for w in webs.values()]


@dataclass
class ReducedBasis:
    signature: Signature
    webs: list[Web]
    keys: list[tuple]


def harvest_reduced(sig: Signature, budget: int = 100000) -> ReducedBasis:
    """Non-elliptic half-plane webs with boundary types sig, ordered so that M is unit lower triangular."""
    by_sig = _class_webs(sig.d, sig.s.count(1), budget)
    webs = list(by_sig.get(tuple(sig.s), {}).items())
    expected = len(enumerate_tableaux((sig.n // 3,) * 3, sig, TableauKind.RSYT))
    if len(webs) != expected:
        raise HarvestIncomplete(f"found {len(webs)} reduced webs, expected {expected}")
    keys = [k for k, _ in webs]
    ws = [w for _, w in webs]
    order = _triangular_order(sig, ws)
    return ReducedBasis(sig, [ws[i] for i in order], [keys[i] for i in order])


# -- tensor evaluation -------------------------------------------------------------------

_EPS = np.zeros((3, 3, 3), dtype=np.int64)
for _p in itertools.permutations(range(3)):
    _EPS[_p] = 1 if _p in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1


def _letters():
    import string
    return string.ascii_letters


def tensor_value(w: Web, T: Filling, sig: Signature | None = None) -> int:
    """Contract the web against e_T = e_{K_1} (x) ... (x) e_{K_d}.

    Labels 1..3 live on edges; each trivalent vertex contributes the
    Levi-Civita symbol of its labels in rotation order.  A type-1 point with
    row tuple (a) pins its edge to a; a type-2 point with rows (a, b)
    contributes eps(a, b, c) for its edge label c.
    """
    d = w.d
    K = row_number_tuples(T, d)
    if sig is not None and tuple(len(k) for k in K) != tuple(sig.s):
        raise ContentMismatch("tableau content does not match the signature")
    if tuple(len(k) for k in K) != tuple(w.types):
        raise ContentMismatch(f"tableau content {tuple(len(k) for k in K)} does not match web {tuple(w.types)}")
    edge_of: dict[int, int] = {}
    count = 0
    for h, t in w.twin.items():
        if h not in edge_of:
            edge_of[h] = edge_of[t] = count
            count += 1
    letters = _letters()
    if count > len(letters):
        raise ValueError("web too large for contraction")
    operands, subs = [], []
    for v in w.internal_vertices():
        operands.append(_EPS)
        subs.append("".join(letters[edge_of[h]] for h in w.rot[v]))
    for i, b in enumerate(w.boundary):
        e = letters[edge_of[w.rot[b][0]]]
        vec = np.zeros(3, dtype=np.int64)
        if len(K[i]) == 1:
            vec[K[i][0] - 1] = 1
        else:
            a, bb = K[i]
            vec = _EPS[a - 1, bb - 1, :].copy()
        operands.append(vec)
        subs.append(e)
    loops = LOOP_VALUE ** w.loops           # vertex-free strands carry the trace of the identity
    if not operands:
        return loops
    value = int(np.einsum(",".join(subs) + "->", *operands, optimize="greedy"))
    return loops * value * evaluation_sign(w, K)


def _inversions(word: Sequence[int]) -> int:
    return sum(1 for i, a in enumerate(word) for b in word[i + 1:] if a > b)


def evaluation_sign(w: Web, K: Sequence[tuple[int, ...]]) -> int:
    """Sign normalization making evaluation matrices nonnegative.

    Three factors: (-1)^floor(V/2) for V trivalent vertices, the parity of
    the row-number word of the tableau (reordering e_T to sorted form), and
    a constant depending on the number t of valence-2 points and on k.
    """
    nv = len(w.internal_vertices())
    t = sum(1 for s in w.types if s == 2)
    k = sum(w.types) // 3
    word = [a for rows in K for a in rows]
    return (-1) ** (nv // 2 + _inversions(word) + t * (t - 1) // 2 + t * (k + 1))


def _raw_matrix(sig: Signature, webs: Sequence[Web]) -> list[list[int]]:
    tabs = enumerate_tableaux((sig.n // 3,) * 3, sig, TableauKind.RSYT)
    return [[tensor_value(w, T) for w in webs] for T in tabs]


def _triangular_order(sig: Signature, webs: Sequence[Web]) -> list[int]:
    """Column order making the evaluation matrix unit lower triangular (up to a global sign)."""
    M = _raw_matrix(sig, webs)
    n = len(webs)
    order: list[int] = []
    remaining = set(range(n))
    for r in range(n):
        cands = [c for c in remaining if M[r][c] == 1
                 and all(M[rr][c] == 0 for rr in range(r))]
        if len(cands) != 1:
            raise SingularM(f"no unique unit-triangular column for row {r + 1}: {cands}")
        order.append(cands[0])
        remaining.discard(cands[0])
    return order


@dataclass
class ChangeOfBasis:
    signature: Signature
    tableaux: list[Filling]
    basis: ReducedBasis
    M: list[list[int]]
    M_inv: list[list[Fraction]]


_COB: dict[tuple[int, ...], ChangeOfBasis] = {}


def matrix_M(sig: Signature) -> ChangeOfBasis:
    """Evaluation matrix M[T][lambda] = lambda(e_T) with its exact inverse (cached per signature)."""
    key = tuple(sig.s)
    if key in _COB:
        return _COB[key]
    basis = harvest_reduced(sig)
    tabs = enumerate_tableaux((sig.n // 3,) * 3, sig, TableauKind.RSYT)
    M = _raw_matrix(sig, basis.webs)
    if exact.det(M) == 0:
        raise SingularM("evaluation matrix is singular")
    M_inv = exact.inverse(M)
    _COB[key] = ChangeOfBasis(sig, tabs, basis, M, M_inv)
    return _COB[key]


def pure_partition_coeffs(sig: Signature) -> list[list[Fraction]]:
    """Row lambda gives the coefficients of the pure partition function in the block basis."""
    return matrix_M(sig).M_inv


# -- serialization ---------------------------------------------------------------------------

def web_to_json(w: Web) -> str:
    ids = {v: i for i, v in enumerate(sorted(w.kind))}
    edges, seen = [], set()
    for h, t in sorted(w.twin.items()):
        if h in seen:
            continue
        seen |= {h, t}
        edges.append([h, t, "forward" if w.out[h] else "backward"])
    return json.dumps({
        "boundary": [{"vertex": ids[b], "side": s, "type": t} for b, s, t in zip(w.boundary, w.sides, w.types)],
        "vertices": [{"id": ids[v], "kind": w.kind[v], "rotation": w.rot[v]} for v in sorted(w.kind)],
        "edges": edges,
        "loops": w.loops,
    })


def web_from_json(text: str) -> Web:
    data = json.loads(text)
    w = Web()
    vid = {}
    for v in data["vertices"]:
        nv = w.add_vertex(v["kind"])
        vid[v["id"]] = nv
    half_owner = {}
    for v in data["vertices"]:
        for h in v["rotation"]:
            half_owner[h] = vid[v["id"]]
    for h, v in half_owner.items():
        w.vert[h] = v
    for v in data["vertices"]:
        w.rot[vid[v["id"]]] = list(v["rotation"])
    for h, t, direction in data["edges"]:
        w.join(h, t, direction == "forward")
    w._next_id = max([*w.vert, *w.kind, 0])
    w.loops = data.get("loops", 0)
    for b in data["boundary"]:
        w.boundary.append(vid[b["vertex"]])
        w.sides.append(b["side"])
        w.types.append(b["type"])
    return w
