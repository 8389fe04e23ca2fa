import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_matchings, cauchy_closed_form, cauchy_det_magnitude
from w3blocks import dimer as D
from w3blocks import gold
from w3blocks import webs as W
from w3blocks.combinatorics import Filling, make_signature
from w3blocks.errors import (AnchorsOutOfRange, CollidingPoints, NonSquareIndexSet, ParityInfeasible, TooLarge,
                             W3Error)

SMALL_SIGNATURES = [(1, 1, 1), (1, 2), (2, 1), (2, 2, 2), (1, 1, 2, 2), (2, 1, 1, 2), (1, 2, 1, 2), (2, 2, 1, 1),
                    (1, 2, 1, 2, 1, 2)]


def small_graphs(s, mode, max_edges=18):
    sig = make_signature(s)
    out = []
    for width in range(1, 7):
        for height in range(1, 5):
            for anchors in itertools.combinations(range(width), sig.d):
                try:
                    g = D.build_graph(width, height, sig, anchors, mode)
                except W3Error:
                    continue
                if len(g.edges) <= max_edges:
                    out.append(g)
    return out


def _bare(width, height):
    g = D.DimerGraph(width, height, make_signature((1, 1, 1)), (), ())
    for r in range(1, height + 1):
        for c in range(width):
            v = g.grid_id(c, r)
            g.color[v] = "black" if (c + r) % 2 == 0 else "white"
            g.pos[v] = (c, r)
    for r in range(1, height + 1):
        for c in range(width):
            v = g.grid_id(c, r)
            if c + 1 < width:
                D._add_edge(g, v, g.grid_id(c + 1, r), 1)
            if r < height:
                D._add_edge(g, v, g.grid_id(c, r + 1), -1 if c % 2 else 1)
    return g


# -- graph construction ---------------------------------------------------------

def test_pendants_follow_the_distinguished_set():
    sig = make_signature((1, 1, 2, 2))
    g = D.build_graph(6, 1, sig, [0, 1, 3, 4])
    assert g.S == (3, 4)
    assert all(g.color[v] == "black" for v in g.boundary)
    whites = [v for v in g.color if v >= 6 and g.color[v] == "white"]
    assert len(whites) == 2
    assert g.excedance() == g.k == 2


def test_distinguished_set_for_six_ones():
    assert D.distinguished_indices(make_signature((1,) * 6)) == (5, 6)
    assert D.distinguished_indices(make_signature((1, 2, 1, 2, 1, 2)), "valence_two") == (2, 4, 6)


def test_smallest_instances():
    sig = make_signature((1, 1, 1))
    with pytest.raises(ParityInfeasible):
        D.build_graph(3, 1, sig, [0, 1, 2])
    g = D.build_graph(4, 1, sig, [0, 1, 2])
    assert D.multiweb_oracle(g)


def test_anchor_validation():
    sig = make_signature((1, 1, 1))
    with pytest.raises(AnchorsOutOfRange):
        D.build_graph(4, 2, sig, [0, 1])
    with pytest.raises(AnchorsOutOfRange):
        D.build_graph(4, 2, sig, [0, 2, 1])
    with pytest.raises(AnchorsOutOfRange):
        D.build_graph(4, 2, sig, [0, 1, 4])


def test_graph_json():
    g = D.build_graph(4, 2, make_signature((1, 1, 1)), [0, 1, 3])
    data = json.loads(g.to_json())
    assert data["signature"] == [1, 1, 1] and len(data["boundary"]) == 3
    assert len(data["edges"]) == len(g.edges)


# -- partition functions ---------------------------------------------------------------

def test_single_edge():
    g = _bare(2, 1)
    assert D.dimer_partition(g) == 1


def test_square_cycle():
    assert D.dimer_partition(_bare(2, 2)) == 2


def test_unbalanced_restriction():
    g = D.build_graph(4, 2, make_signature((1, 1, 1)), [0, 1, 3])
    # seven black against five white; keeping two pendants leaves six against five
    assert D.dimer_partition(g, keep=[1, 2]) == 0
    assert D.dimer_partition(g, keep=[]) == 0


@given(st.integers(1, 4), st.integers(1, 4))
def test_kasteleyn_counts_grid_matchings(width, height):
    g = _bare(width, height)
    edges = [(b, w) for b, w, _ in g.edges]
    assert D.dimer_partition(g) == brute_matchings(g.color, edges)


@pytest.mark.parametrize("s", [(1, 1, 1), (1, 1, 2, 2), (2, 2, 2)])
def test_kasteleyn_counts_pendant_matchings(s):
    for g in small_graphs(s, "last_k", 40)[:40]:
        for r in range(g.signature.d + 1):
            for keep in itertools.combinations(range(1, g.signature.d + 1), r):
                removed = {g.boundary[j - 1] for j in range(1, g.signature.d + 1) if j not in keep}
                verts = [v for v in g.color if v not in removed]
                edges = [(b, w) for b, w, _ in g.edges]
                assert D.dimer_partition(g, keep) == brute_matchings(verts, edges) == D.count_matchings(g, keep)


def test_float_backend_matches_exact():
    sig = make_signature((1, 1, 2, 2))
    g = D.build_graph(8, 8, sig, D.place_anchors(sig, 8, [0.2, 0.4, 0.6, 0.8]))
    exact = D.finite_connection_probabilities(g.signature, g)
    approx = D.finite_connection_probabilities(g.signature, g, backend="float")
    assert sum(exact.probabilities) == 1
    for p, q in zip(exact.probabilities, approx.probabilities):
        assert abs(float(p) - q) < 1e-9


# -- oracle equality -------------------------------------------------------------------

# (2,2,1,1) with valence-two pendants and the six-point alternating case with
# last_k pendants have no feasible graph within the oracle's edge budget
SWEEP = [(s, m) for s in SMALL_SIGNATURES for m in ("last_k", "valence_two")
         if (s, m) not in {((2, 2, 1, 1), "valence_two"), ((1, 2, 1, 2, 1, 2), "last_k")}]


@pytest.mark.parametrize("s,mode", SWEEP)
def test_kasteleyn_route_equals_multiweb_oracle(s, mode):
    sig = make_signature(s)
    graphs = small_graphs(s, mode)
    assert graphs
    cob = W.matrix_M(sig)
    for g in graphs:
        C = D.multiweb_oracle(g)
        assert all(c >= 0 for c in C.values())
        cache: dict = {}
        for t, T in enumerate(cob.tableaux):
            paired = sum(c * cob.M[t][lam] for lam, c in C.items())
            assert D.z_tableau(T, g, cache=cache) == paired
        if any(D.z_tableau(T, g, cache=cache) for T in cob.tableaux):
            for ref in range(1, len(cob.tableaux) + 1):
                try:
                    rep = D.finite_connection_probabilities(sig, g, ref)
                except D.ZeroPartition:
                    continue
                assert sum(rep.probabilities) == 1
                assert all(0 <= p <= 1 for p in rep.probabilities)
                assert {i: Fraction(c) for i, c in enumerate(rep.coefficients) if c} == C
        else:
            assert not C


def test_oracle_budget():
    g = D.build_graph(6, 4, make_signature((1, 1, 1)), [0, 1, 3])
    with pytest.raises(TooLarge):
        D.multiweb_oracle(g)


def test_alternating_coefficients():
    sig = make_signature((1, 2, 1, 2, 1, 2))
    g = D.build_graph(6, 2, sig, [0, 1, 2, 3, 4, 5], "valence_two")
    rep = D.finite_connection_probabilities(sig, g)
    assert all(c >= 0 for c in rep.coefficients)
    assert sum(rep.probabilities) == 1


# -- scaling limits -------------------------------------------------------------------

def test_mixed_four_limits_at_integers():
    sig = make_signature((1, 1, 2, 2))
    p1 = D.limit_probability(1, 2, [0, 1, 2, 3], sig)
    p2 = D.limit_probability(2, 2, [0, 1, 2, 3], sig)
    assert (p1, p2) == (Fraction(1, 4), Fraction(3, 4))
    # hand substitution into the closed form (x2-x1)(x4-x3)/((x3-x1)(x4-x2))
    assert p1 == Fraction(1 * 1, 2 * 2)


@pytest.mark.parametrize("case", gold.WORKED_CASES, ids=lambda c: ",".join(map(str, c.signature)))
def test_limits_equal_closed_forms(case):
    sig = make_signature(case.signature)
    for lam, expected in enumerate(case.limits, 1):
        num, den = D.limit_probability_function(lam, case.reference, sig)
        gn, gd = expected.polynomials(sig.d)
        assert num * gd == gn * den


def test_alternating_second_limit_carries_the_two():
    sig = make_signature((1, 2, 1, 2, 1, 2))
    assert gold.ALTERNATING.limits[1].coefficient == 2
    assert W.matrix_M(sig).M[5][1] == 2


@settings(max_examples=15)
@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=9), min_size=6, max_size=6, unique=True))
def test_limits_sum_to_one(xs):
    xs = sorted(xs)
    for s in [(1,) * 6, (1, 2, 1, 2, 1, 2)]:
        sig = make_signature(s)
        n = len(W.matrix_M(sig).tableaux)
        for T in (1, n):
            probs = [D.limit_probability(lam, T, xs, sig) for lam in range(1, n + 1)]
            if D.limit_probability_function(1, T, sig)[1].evaluate(xs) == 0:
                continue
            assert sum(probs) == 1
            assert all(0 <= p <= 1 for p in probs)


def test_colliding_points():
    sig = make_signature((1, 1, 2, 2))
    with pytest.raises(CollidingPoints):
        D.limit_probability(1, 2, [0, 1, 1, 3], sig)
    with pytest.raises(CollidingPoints):
        D.limit_probability(1, 2, [0, 2, 1, 3], sig)


# -- Cauchy determinants ----------------------------------------------------------------

def test_cauchy_empty_and_single():
    sig = make_signature((1, 1, 2, 2))
    T2 = Filling.of([[1, 3], [2, 4], [3, 4]])
    x = [0, 1, 2, 3]
    assert D.cauchy_limit_ratio(T2, 3, sig, x) == 1
    assert D.cauchy_limit_ratio(T2, 1, sig, x) == Fraction(1, 3)


def test_cauchy_two_by_two():
    sig = make_signature((1,) * 6)
    T1 = Filling.of([[1, 2], [3, 4], [5, 6]])
    x = [Fraction(v) for v in (0, 1, 2, 3, 5, 8)]
    assert D.cauchy_index_sets(T1, 1, sig) == ([1, 2], [5, 6])
    value = D.cauchy_limit_ratio(T1, 1, sig, x)
    assert value == D.cauchy_product(T1, 1, sig, x)
    assert value == cauchy_det_magnitude([x[0], x[1]], [x[4], x[5]]) == cauchy_closed_form([x[0], x[1]], [x[4], x[5]])


def test_cauchy_non_square():
    sig = make_signature((1,) * 6)
    with pytest.raises(NonSquareIndexSet):
        D.cauchy_index_sets(Filling.of([[1, 2], [3, 4], [5, 6]]), 1, sig, S=[5])


# -- convergence ------------------------------------------------------------------------

def test_boundary_map_is_increasing_and_symmetric():
    xs = D.boundary_coordinates(list(range(16)), 16, 16)
    assert all(a < b for a, b in zip(xs, xs[1:]))
    assert all(abs(a + b) < 1e-12 for a, b in zip(xs, reversed(xs)))
    assert -1 < xs[0] and xs[-1] < 1


def test_anchor_placement_needs_room():
    with pytest.raises(AnchorsOutOfRange):
        D.place_anchors(make_signature((1,) * 6), 8, [i / 7 for i in range(1, 7)])


@pytest.mark.parametrize("s", [(1, 1, 1), (1, 1, 2, 2)])
def test_convergence_on_small_widths(s):
    sig = make_signature(s)
    rows = D.convergence_study(sig, None, [i / (sig.d + 1) for i in range(1, sig.d + 1)], [8, 12, 16])
    assert all(D.errors_nonincreasing(rows).values())
    for size in (8, 12, 16):
        probs = [r.finite_pr for r in rows if r.size == size]
        assert abs(sum(probs) - 1) < 1e-9
        assert all(-1e-12 <= p <= 1 + 1e-12 for p in probs)
    text = D.study_to_csv(rows)
    assert text.splitlines()[0] == "size,lambda,finite_pr,limit_p,rel_err"
    assert len(text.splitlines()) == len(rows) + 1


def test_study_needs_two_sizes():
    with pytest.raises(ValueError):
        D.convergence_study(make_signature((1, 1, 1)), None, [0.25, 0.5, 0.75], [8])


@settings(max_examples=25)
@given(st.lists(st.integers(0, 7), min_size=4, max_size=4, unique=True), st.sampled_from(["last_k", "valence_two"]))
def test_random_anchors_give_a_distribution(cols, mode):
    sig = make_signature((1, 1, 2, 2))
    try:
        g = D.build_graph(8, 4, sig, sorted(cols), mode)
        rep = D.finite_connection_probabilities(sig, g)
    except W3Error:
        return
    assert sum(rep.probabilities) == 1
    assert all(0 <= p <= 1 for p in rep.probabilities)
    assert all(c >= 0 for c in rep.coefficients)
