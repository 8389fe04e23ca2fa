from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from w3blocks import gold
from w3blocks import webs as W
from w3blocks.combinatorics import make_signature
from w3blocks.errors import BoundaryMismatch
from w3blocks.exact import det, matmul
from w3blocks.poly import SparsePolynomial, perm_sign, specht

GOLD = [(1, 1, 2, 2), (1,) * 6, (1, 2, 1, 2, 1, 2)]


def _stack(n, word):
    w = W.h_web(word[0], n)
    for i in word[1:]:
        w = W.concatenate(W.h_web(i, n), w)
    return w


def _exkup():
    return W.disjoint_union(_stack(4, (1, 2, 1, 3, 2)), W.theta_web())


def _identity(n):
    return W.WebSum.of(W.identity_strip([1] * n))


# -- structure -------------------------------------------------------------------

def test_identity_strip_valid():
    ok, msg = W.validate(W.identity_strip([1, 1, 1]))
    assert ok, msg


def test_mixed_vertex_invalid():
    w = W.h_web(1, 3)
    v = w.internal_vertices()[0]
    h = w.rot[v][0]
    w.out[h], w.out[w.twin[h]] = not w.out[h], not w.out[w.twin[h]]
    ok, msg = W.validate(w)
    assert not ok and "source nor sink" in msg


def test_two_vertex_mixed_type_web_valid():
    w = W.h_web(2, 4, [1, 2, 2, 1])
    assert len(w.internal_vertices()) == 2
    assert W.validate(w)[0]


def test_h_needs_equal_types():
    with pytest.raises(BoundaryMismatch):
        W.h_web(1, 2, [1, 2])


def test_identity_is_neutral():
    w = W.h_web(2, 4)
    for out in (W.concatenate(W.identity_strip([1] * 4), w), W.concatenate(w, W.identity_strip([1] * 4))):
        assert W.canonical_key(out) == W.canonical_key(w)


def test_json_round_trip():
    for w in [_stack(4, (1, 2, 1, 3, 2)), W.h_web(2, 4, [1, 2, 2, 1])] + W.matrix_M(make_signature(GOLD[2])).basis.webs:
        back = W.web_from_json(W.web_to_json(w))
        assert W.canonical_key(back) == W.canonical_key(w)
        assert W.validate(back)[0]


# -- local relations -------------------------------------------------------------

def test_loop_value():
    e = W.Web()
    e.loops = 1
    assert W.closed_value(e) == 3
    ((c, rest),) = W.reduce(e).webs()
    assert c == 3 and not rest.kind


def test_digon_value():
    ((c, w),) = W.reduce(W.concatenate(W.h_web(1, 2), W.h_web(1, 2))).webs()
    assert c == 2 and W.canonical_key(w) == W.canonical_key(W.h_web(1, 2))


def test_square_splits_into_two_pairings():
    w = _stack(3, (1, 2, 1))
    assert sorted(len(f) for f in w.internal_faces()) == [4]
    terms = W.reduce(w).webs()
    assert sorted(c for c, _ in terms) == [1, 1]
    assert all(W.is_reduced(x) for _, x in terms)
    keys = {W.canonical_key(x) for _, x in terms}
    assert W.canonical_key(W.h_web(1, 3)) in keys


def test_theta_value():
    assert W.closed_value(W.theta_web()) == 6


def test_cup_cap_square():
    E = W.cup_cap_web(1, [1, 2])
    ((c, w),) = W.reduce(W.concatenate(E, E)).webs()
    assert c == 3 and W.canonical_key(w) == W.canonical_key(E)


def test_worked_product_reduces_to_three_sixes():
    terms = W.reduce(_exkup()).webs()
    assert sorted(c for c, _ in terms) == [6, 6, 6]
    assert all(W.is_reduced(x) for _, x in terms)


@given(st.integers(0, 10 ** 6))
def test_reduction_is_confluent(seed):
    w = _exkup()
    assert W.reduce(w, seed=seed) == W.reduce(w)


@given(st.lists(st.integers(1, 3), min_size=1, max_size=5), st.integers(0, 1000))
def test_random_products_confluent(word, seed):
    w = _stack(4, word)
    assert W.reduce(w, seed=seed) == W.reduce(w)


# -- symmetric-group relations ----------------------------------------------------

@pytest.mark.parametrize("n,i", [(2, 1), (4, 1), (4, 2), (4, 3)])
def test_tau_squared(n, i):
    t = W.tau_image(i, n)
    assert W.product(t, t) == _identity(n)


@pytest.mark.parametrize("i", [1, 2])
def test_braid(i):
    a, b = W.tau_image(i, 4), W.tau_image(i + 1, 4)
    assert W.product(a, W.product(b, a)) == W.product(b, W.product(a, b))


def test_far_generators_commute():
    a, b = W.tau_image(1, 4), W.tau_image(3, 4)
    assert W.product(a, b) == W.product(b, a)


@pytest.mark.parametrize("n,start", [(4, 1), (5, 1), (5, 2)])
def test_four_site_antisymmetrizer_vanishes(n, start):
    total = W.WebSum()
    for img in permutations(range(start, start + 4)):
        perm = list(range(1, n + 1))
        for a, b in zip(range(start, start + 4), img):
            perm[a - 1] = b
        total = total + W.permutation_image(perm).scale(perm_sign(perm))
    assert total.is_zero()


def test_three_site_antisymmetrizer_survives():
    total = W.WebSum()
    for perm in permutations(range(1, 4)):
        total = total + W.permutation_image(list(perm)).scale(perm_sign(list(perm)))
    assert not total.is_zero()


# -- basis and evaluation matrix ----------------------------------------------------

@pytest.mark.parametrize("case", gold.WORKED_CASES, ids=lambda c: ",".join(map(str, c.signature)))
def test_harvest_and_matrix_against_worked_cases(case):
    sig = make_signature(case.signature)
    cob = W.matrix_M(sig)
    assert len(cob.basis.webs) == len(case.tableaux)
    assert all(W.is_reduced(w) and W.validate(w)[0] for w in cob.basis.webs)
    assert [t.rows for t in cob.tableaux] == list(case.tableaux)
    assert [list(r) for r in case.M] == cob.M
    n = len(cob.M)
    assert matmul(cob.M, cob.M_inv) == [[int(i == j) for j in range(n)] for i in range(n)]
    assert det(cob.M) == 1


def test_mixed_four_inverse():
    assert W.matrix_M(make_signature((1, 1, 2, 2))).M_inv == [[1, 0], [-1, 1]]


def test_six_ones_row_four_and_alternating_two():
    assert W.matrix_M(make_signature((1,) * 6)).M[3] == [1, 1, 1, 1, 0]
    assert W.matrix_M(make_signature((1, 2, 1, 2, 1, 2))).M[5] == [1, 2, 1, 1, 1, 1]


@pytest.mark.parametrize("s", GOLD)
def test_unit_lower_triangular_nonnegative(s):
    M = W.matrix_M(make_signature(s)).M
    for i, row in enumerate(M):
        assert row[i] == 1 and all(v == 0 for v in row[i + 1:]) and all(v >= 0 for v in row)


@pytest.mark.parametrize("case", [gold.SIX_ONES, gold.ALTERNATING], ids=["ones", "alternating"])
def test_pure_partition_functions_factor(case):
    sig = make_signature(case.signature)
    cob = W.matrix_M(sig)
    blocks = [specht(T.transpose(), sig.d) for T in cob.tableaux]
    for row, expected in zip(W.pure_partition_coeffs(sig), case.pure):
        Z = SparsePolynomial.zero(sig.d)
        for c, P in zip(row, blocks):
            Z = Z + P * c
        num, den = expected.polynomials(sig.d)
        assert Z * den == num


def test_second_pure_function_for_six_ones():
    sig = make_signature((1,) * 6)
    cob = W.matrix_M(sig)
    x = lambda i: SparsePolynomial.var(6, i)
    Z2 = specht(cob.tableaux[1].transpose(), 6) - specht(cob.tableaux[0].transpose(), 6)
    assert Z2 == (x(2) - x(1)) * (x(6) - x(3)) * (x(5) - x(4))


@pytest.mark.parametrize("i", [1, 2, 3, 4, 5])
def test_tensor_evaluation_commutes_with_reduction(i):
    sig = make_signature((1,) * 6)
    cob = W.matrix_M(sig)
    for w in cob.basis.webs:
        acted = W.act(W.h_web(i, 6), w)
        reduced = W.reduce(acted)
        for T in cob.tableaux:
            direct = W.tensor_value(acted, T, sig)
            via = sum(c * W.tensor_value(x, T, sig) for c, x in reduced.webs())
            assert direct == via


def test_theta_bubble_scales_basis_web():
    w = W.matrix_M(make_signature((1, 2, 1, 2, 1, 2))).basis.webs[-1]
    ((c, x),) = W.reduce(W.disjoint_union(w, W.theta_web())).webs()
    assert c == 6 and W.canonical_key(x) == W.canonical_key(w)


@pytest.mark.parametrize("i", [1, 2, 3, 4, 5])
def test_alternating_evaluation_commutes_with_reduction(i):
    sig = make_signature((1, 2, 1, 2, 1, 2))
    cob = W.matrix_M(sig)
    for w in cob.basis.webs:
        acted = W.act(W.cup_cap_web(i, list(sig.s)), w)
        reduced = W.reduce(acted)
        for T in cob.tableaux:
            via = sum(c * W.tensor_value(x, T, sig) for c, x in reduced.webs())
            assert W.tensor_value(acted, T, sig) == via
