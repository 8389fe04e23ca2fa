import json

import pytest
from hypothesis import given, strategies as st

from oracles import brute_column_strict, brute_row_strict
from w3blocks.combinatorics import (Filling, Partition, TableauKind, enumerate_tableaux, gold_tableaux, kostka,
                                    make_signature, parse_signature, partitions, row_content, row_number_tuples,
                                    row_sum_vector, standard_tableaux, standardize)
from w3blocks.errors import NotDivisibleByThree, NotTableau, ShapeContentMismatch

GOLD = [(1, 1, 2, 2), (1,) * 6, (1, 2, 1, 2, 1, 2)]

signatures = st.lists(st.sampled_from([1, 2]), min_size=1, max_size=7).filter(lambda s: sum(s) % 3 == 0)


# -- signatures -----------------------------------------------------------------

def test_signature_derived_data():
    sig = make_signature([1, 1, 2, 2])
    assert sig.n == 6
    assert sig.q == (1, 1, -1, -1)
    assert sig.p[:4] == (1, 2, 3, 5)
    assert sig.p[-1] == sig.n + 1
    assert sig.pi.parts == (2, 2, 2)


def test_all_ones_signature():
    sig = make_signature([1, 1, 1])
    assert (sig.n, sig.q, sig.p[:3], sig.pi.parts) == (3, (1, 1, 1), (1, 2, 3), (1, 1, 1))


def test_divisibility_gate():
    with pytest.raises(NotDivisibleByThree):
        make_signature([2, 2])


def test_rejects_bad_valence():
    with pytest.raises(ValueError):
        make_signature([1, 3])


@given(signatures)
def test_signature_offsets_increase(s):
    sig = make_signature(s)
    assert sig.p[0] == 1 and sig.p[-1] == sig.n + 1
    assert all(a < b for a, b in zip(sig.p, sig.p[1:]))
    assert all((q == 1) == (v == 1) for q, v in zip(sig.q, sig.s))


@given(st.integers(1, 9).flatmap(lambda n: st.sampled_from(partitions(n))))
def test_conjugate_is_involution(p):
    assert p.conjugate().conjugate() == p
    assert all(a >= b >= 1 for a, b in zip(p.parts, p.parts[1:] + (1,)))


# -- enumeration -----------------------------------------------------------------

def test_mixed_four_listing():
    tabs = enumerate_tableaux((2, 2, 2), (1, 1, 2, 2), TableauKind.RSYT)
    assert [t.rows for t in tabs] == [((1, 2), (3, 4), (3, 4)), ((1, 3), (2, 4), (3, 4))]


def test_six_ones_listing():
    tabs = enumerate_tableaux((2, 2, 2), (1,) * 6, TableauKind.RSYT)
    assert len(tabs) == 5
    assert tabs[0].rows == ((1, 2), (3, 4), (5, 6))
    assert tabs[-1].rows == ((1, 4), (2, 5), (3, 6))


def test_single_column_standard():
    assert [t.rows for t in enumerate_tableaux((1, 1, 1), (1, 1, 1), "SYT")] == [((1,), (2,), (3,))]


@pytest.mark.parametrize("s,count", [(GOLD[0], 2), (GOLD[1], 5), (GOLD[2], 6)])
def test_gold_kostka(s, count):
    assert kostka(make_signature(s).pi, s) == count


@pytest.mark.parametrize("shape,word", [((2, 2, 2), (1, 1, 2, 2)), ((2, 2, 2), (1,) * 6), ((3, 2, 1), (1,) * 6),
                                        ((3, 3, 3), (1, 2, 1, 2, 1, 2)), ((3, 2, 2), (2, 1, 2, 2)),
                                        ((4, 1, 1), (1, 2, 1, 2))])
def test_enumeration_matches_brute_force(shape, word):
    got_r = [t.rows for t in enumerate_tableaux(shape, word, "RSYT")]
    got_c = [t.rows for t in enumerate_tableaux(shape, word, "CSYT")]
    assert got_r == brute_row_strict(shape, word)
    assert got_c == brute_column_strict(shape, word)


@given(signatures)
def test_column_strict_count_equals_row_strict_of_conjugate(s):
    for p in partitions(sum(s), 3):
        csyt = enumerate_tableaux(p, s, "CSYT")
        rsyt = enumerate_tableaux(p.conjugate(), s, "RSYT")
        assert len(csyt) == len(rsyt)
        assert sorted(t.transpose().rows for t in csyt) == sorted(t.rows for t in rsyt)


@given(signatures)
def test_kostka_positive_iff_nonempty(s):
    sig = make_signature(s)
    assert (kostka(sig.pi, sig) > 0) == bool(gold_tableaux(sig))


def test_shape_content_mismatch():
    with pytest.raises(ShapeContentMismatch):
        enumerate_tableaux((2, 2), (1, 1, 1), "RSYT")


# -- standardization ----------------------------------------------------------------

def test_standardize_example():
    T = Filling.of([[1, 2], [3, 4], [3, 4]])
    assert standardize(T, (1, 1, 2, 2)).rows == ((1, 2), (3, 5), (4, 6))


def test_standardize_fixes_standard_tableaux():
    for T in standard_tableaux((3, 2, 1)):
        assert standardize(T, (1,) * 6) == T


@pytest.mark.parametrize("s", GOLD)
def test_standardize_commutes_with_transpose(s):
    for T in gold_tableaux(make_signature(s)):
        S = standardize(T, s)
        assert S.is_standard()
        assert standardize(T.transpose(), s) == S.transpose()


@given(signatures)
def test_standardize_injective(s):
    sig = make_signature(s)
    tabs = gold_tableaux(sig)
    images = {standardize(T, sig) for T in tabs}
    assert len(images) == len(tabs)


def test_standardize_rejects_non_tableau():
    with pytest.raises(NotTableau):
        standardize(Filling.of([[2, 1], [3, 4]]), (1, 1, 1, 1))


# -- row data ---------------------------------------------------------------------

def test_row_content():
    T = Filling.of([[1, 3], [2, 4], [3, 4]])
    assert row_content(T, 1) == {1, 3}
    assert row_content(T, 3) == {3, 4}
    col = Filling.of([[1], [2], [3]])
    assert [row_content(col, a) for a in (1, 2, 3)] == [{1}, {2}, {3}]


def test_row_number_tuples_worked_example():
    K = row_number_tuples(Filling.of([[1, 2], [1, 3], [2, 4]]))
    assert K[:3] == [(1, 2), (3, 1), (2,)]
    # entry 4 sits in row 3
    assert K[3] == (3,)


def test_row_number_tuples_all_ones():
    for T in standard_tableaux((2, 2, 2)):
        assert all(len(k) == 1 for k in row_number_tuples(T))


@given(st.sampled_from([3, 4, 5, 6, 7]).flatmap(
    lambda n: st.sampled_from([p for p in partitions(n) if p.n_columns <= 3])))
def test_row_sum_vector_injective_on_three_column_shapes(p):
    n = p.size
    for word in {(1,) * n, (2,) + (1,) * (n - 2) if n >= 2 else (1,) * n}:
        tabs = enumerate_tableaux(p, word, "CSYT")
        sig_vectors = {tuple(r - s for r, s in zip(_row_sums(T, len(word)), word)) for T in tabs}
        assert len(sig_vectors) == len(tabs)


def _row_sums(T, d):
    out = [0] * d
    for r, row in enumerate(T.rows, 1):
        for x in row:
            out[x - 1] += r
    return out


def test_row_sum_vector_helper_agrees():
    sig = make_signature((1, 1, 2, 2))
    for T in enumerate_tableaux((3, 3), sig, "CSYT"):
        assert row_sum_vector(T, sig) == tuple(r - s for r, s in zip(_row_sums(T, 4), sig.s))


# -- serialization ---------------------------------------------------------------

@pytest.mark.parametrize("s", GOLD)
def test_filling_json_round_trip(s):
    sig = make_signature(s)
    for T in gold_tableaux(sig):
        text = T.to_json(sig)
        assert set(json.loads(text)) == {"shape", "rows", "content"}
        assert Filling.from_json(text) == T


def test_parse_signature():
    assert parse_signature("1, 2 ,1,2,1,2").s == (1, 2, 1, 2, 1, 2)


def test_dominance():
    assert Partition((3, 3)).dominates(Partition((2, 2, 2)))
    assert not Partition((2, 2, 2)).dominates(Partition((3, 3)))
