from __future__ import annotations

import random
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, strategies as st

from apartments.apartment import (
    Apartment,
    Frame,
    all_apartments,
    apartment_from_frame,
    codisjoint_adjacency,
    common_apartment,
    complementary_adjacent,
    complementary_subset,
    different_types_by_intersection,
    exhaustive_witness,
    frame_count,
    intersection_maximal_adjacency,
    is_inexact,
    labels_from_json,
    labels_to_json,
    maximal_inexact_subset,
    maximal_inexact_subsets_bruteforce,
    ordered_pairs,
    recognize_apartment,
    recover_simple_subsets,
    simple_subsets,
    structural_maximal_inexact,
)
from apartments.errors import GuardError
from apartments.field import field_of_order
from apartments.grassmann import adjacent
from apartments.subspace import contains, random_subspace, span

L = lambda s: tuple(int(c) - 1 for c in s)  # "13" -> (0, 2)
Ls = lambda *ss: frozenset(L(s) for s in ss)


def std(n, k, q=2):
    return Apartment(Frame.standard(field_of_order(q), n), k)


def test_standard_apartment_labels():
    A = std(4, 2)
    assert A.labels == tuple(L(s) for s in ("12", "13", "14", "23", "24", "34"))
    assert A.elements[L("13")] == span(A.field, 4, [(1, 0, 0, 0), (0, 0, 1, 0)])


@given(st.sampled_from([2, 3, 4]), st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_random_frame_roundtrip(q, seed, n):
    F = field_of_order(q)
    rng = random.Random(seed)
    fr = Frame.random(F, n, rng)
    k = rng.randrange(1, n)
    A = apartment_from_frame(fr, k)
    assert len(A) == comb(n, k) == len(A.element_set)
    for J, X in A.elements.items():
        assert A.label_of[X] == J
        assert X == span(F, n, [fr.vectors[j] for j in J])
    # rescaling the frame vectors gives the same apartment
    scaled = fr.rescaled([rng.randrange(1, q) for _ in range(n)])
    assert Apartment(scaled, k) == A and scaled.line_set() == fr.line_set()


def test_dependent_frame_rejected():
    with pytest.raises(ValueError, match="dependent"):
        Frame(field_of_order(2), ((1, 0, 0), (0, 1, 0), (1, 1, 0)))
    with pytest.raises(ValueError):
        Apartment(Frame.standard(field_of_order(2), 3), 3)


def test_simple_subsets():
    A = std(4, 2)
    plus, minus = simple_subsets(A, 0)
    assert plus == Ls("12", "13", "14") and minus == Ls("23", "24", "34")
    for n, k in [(4, 2), (5, 2), (6, 3)]:
        A = std(n, k)
        for i in range(n):
            p, m = simple_subsets(A, i)
            assert len(p) == comb(n - 1, k - 1) and len(m) == comb(n - 1, k)
            assert not p & m and p | m == A.all_labels()


def test_complementary_and_maximal_inexact():
    A = std(4, 2)
    assert complementary_subset(A, 0, 1) == Ls("13", "14")
    assert maximal_inexact_subset(A, 0, 1) == Ls("12", "23", "24", "34")
    assert len({maximal_inexact_subset(A, i, j) for i, j in ordered_pairs(4)}) == 12
    with pytest.raises(ValueError):
        complementary_subset(A, 2, 2)
    for n, k in [(4, 2), (5, 2), (5, 3), (6, 3)]:
        A = std(n, k)
        for i, j in ordered_pairs(n):
            c, m = complementary_subset(A, i, j), maximal_inexact_subset(A, i, j)
            assert not c & m and c | m == A.all_labels()


def test_is_inexact_examples():
    A = std(4, 2)
    assert is_inexact(A, A.labels, oracle=True) == (False, None)
    ok, w = is_inexact(A, maximal_inexact_subset(A, 0, 1))
    assert ok and w != A and all(A.elements[J] in w for J in maximal_inexact_subset(A, 0, 1))
    # the structural witness for (1,2) is the frame e_1 -> e_1 + e_2
    assert w == Apartment(A.frame.elementary(0, 1, 1), 2)
    for J in A.labels:
        ok, w = is_inexact(A, [J], oracle=True)
        assert ok and A.elements[J] in w and w != A
    with pytest.raises(ValueError):
        is_inexact(A, [(0, 1, 2)])
    with pytest.raises(ValueError):
        is_inexact(A, [random_subspace(A.field, 4, 2, random.Random(0))] * 0 + [span(A.field, 4, [(1, 1, 0, 0), (0, 0, 1, 1)])])


@pytest.mark.parametrize("n,k,q", [(4, 2, 2), (4, 2, 3), (5, 2, 2)])
def test_bruteforce_matches_structural(n, k, q):
    A = std(n, k, q)
    found = set(maximal_inexact_subsets_bruteforce(A))
    assert found == set(structural_maximal_inexact(A).values())
    assert len(found) == n * (n - 1)


def test_bruteforce_random_frame_and_degenerate():
    rng = random.Random(5)
    A = Apartment(Frame.random(field_of_order(3), 4, rng), 2)
    assert set(maximal_inexact_subsets_bruteforce(A)) == set(structural_maximal_inexact(A).values())
    A = std(3, 1)
    found = maximal_inexact_subsets_bruteforce(A)
    assert sorted(map(sorted, found)) == sorted(sorted(A.all_labels() - {(i,)}) for i in range(3))


def test_bruteforce_guard():
    with pytest.raises(GuardError):
        maximal_inexact_subsets_bruteforce(std(6, 3), max_elements=12)


def test_inexactness_is_downward_closed():
    A = std(4, 2, 3)
    rng = random.Random(1)
    for _ in range(30):
        X = frozenset(rng.sample(A.labels, rng.randrange(1, 7)))
        if exhaustive_witness(A, X) is not None:
            for J in X:
                assert exhaustive_witness(A, X - {J}) is not None


def test_complementary_adjacency_label_rule():
    assert complementary_adjacent(L("12"), L("13"))
    assert not complementary_adjacent(L("12"), L("21"))
    assert not complementary_adjacent(L("12"), L("34"))
    with pytest.raises(ValueError):
        complementary_adjacent((0, 1), (0, 1))


def _label_adjacency(n):
    pairs = ordered_pairs(n)
    return pairs, {(a, b) for a, b in combinations(range(len(pairs)), 2)
                   if complementary_adjacent(pairs[a], pairs[b])}


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (5, 3), (6, 2), (6, 3), (7, 3)])
def test_codisjoint_adjacency_matches_label_rule(n, k):
    A = std(n, k)
    pairs, want = _label_adjacency(n)
    family = [complementary_subset(A, i, j) for i, j in pairs]
    assert codisjoint_adjacency(family) == want


@pytest.mark.parametrize("n,k,agrees", [(6, 3, True), (7, 3, True), (4, 2, False), (5, 2, False), (5, 3, False)])
def test_intersection_maximality_adjacency(n, k, agrees):
    # inclusion-maximal intersections single out the adjacent pairs only
    # when 3 <= k <= n - 3; for k = 2 or k = n - 2 they do not
    A = std(n, k)
    pairs, want = _label_adjacency(n)
    family = [complementary_subset(A, i, j) for i, j in pairs]
    assert (intersection_maximal_adjacency(family) == want) == agrees


def test_intersection_criterion_counterexample_n4():
    A = std(4, 2)
    c12, c34 = complementary_subset(A, 0, 1), complementary_subset(A, 2, 3)
    assert c12 & c34 == Ls("13")
    assert not complementary_adjacent((0, 1), (2, 3))


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (5, 3), (6, 3), (6, 2)])
def test_recover_simple_subsets_label_free(n, k):
    A = std(n, k)
    pairs = ordered_pairs(n)
    # hand over opaque tokens so no label structure leaks in
    rng = random.Random(n * 10 + k)
    token = {J: rng.random() for J in A.labels}
    coll = [frozenset(token[J] for J in complementary_subset(A, i, j)) for i, j in pairs]
    rng.shuffle(coll)
    got = set(recover_simple_subsets(coll, n, k))
    want = {frozenset(token[J] for J in s) for i in range(n) for s in simple_subsets(A, i)}
    assert got == want


def test_recover_examples_and_range():
    A = std(4, 2)
    plus0 = frozenset().union(*(complementary_subset(A, 0, j) for j in (1, 2, 3)))
    minus0 = frozenset().union(*(complementary_subset(A, j, 0) for j in (1, 2, 3)))
    assert plus0 == simple_subsets(A, 0)[0] and minus0 == simple_subsets(A, 0)[1]
    with pytest.raises(ValueError, match="machinery requires 1 < k < n-1"):
        recover_simple_subsets([], 4, 1)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 2), (6, 3)])
def test_simple_subset_types(n, k):
    A = std(n, k)
    comp = [complementary_subset(A, i, j) for i, j in ordered_pairs(n)]
    simple = [(i, s, p) for i in range(n) for s, p in zip(simple_subsets(A, i), "+-")]
    for (i, S, a), (j, T, b) in combinations(simple, 2):
        if S == T:
            continue
        assert different_types_by_intersection(S, T, comp) == (a != b)


@given(st.sampled_from([2, 3, 4]), st.integers(0, 2**32 - 1), st.integers(2, 5))
def test_common_apartment(q, seed, n):
    F = field_of_order(q)
    rng = random.Random(seed)
    k = rng.randrange(1, n)
    X, Y = random_subspace(F, n, k, rng), random_subspace(F, n, k, rng)
    A = common_apartment(X, Y)
    assert X in A and Y in A
    assert common_apartment(X, X).element_set >= {X}


def test_common_apartment_adjacent_labels():
    F = field_of_order(3)
    rng = random.Random(2)
    for _ in range(200):
        X = random_subspace(F, 4, 2, rng)
        Y = random_subspace(F, 4, 2, rng)
        A = common_apartment(X, Y)
        assert X in A and Y in A
        if adjacent(X, Y):
            assert len(set(A.label_of[X]) & set(A.label_of[Y])) == 1


def test_common_apartment_1000_pairs():
    rng = random.Random(11)
    for t in range(1000):
        F = field_of_order([2, 3, 4][t % 3])
        n = 3 + t % 3
        k = 1 + t % (n - 1)
        X, Y = random_subspace(F, n, k, rng), random_subspace(F, n, k, rng)
        A = common_apartment(X, Y)
        assert X in A and Y in A


def test_frames_and_apartments_enumeration():
    F = field_of_order(2)
    assert frame_count(3, 2) == 28 and frame_count(4, 2) == 840
    apts = all_apartments(F, 3, 1)
    assert len(apts) == 28 == len(set(apts))
    with pytest.raises(GuardError):
        all_apartments(field_of_order(3), 4, 2, max_frames=1000)


def test_recognize_apartment():
    rng = random.Random(4)
    for q, n, k in [(2, 4, 2), (3, 4, 2), (4, 3, 1), (3, 5, 3), (2, 4, 3)]:
        F = field_of_order(q)
        A = Apartment(Frame.random(F, n, rng), k)
        fr = recognize_apartment(A.element_set)
        assert fr is not None and Apartment(fr, k) == A
    A = std(4, 2)
    bad = set(A.element_set)
    bad.remove(A.elements[(0, 1)])
    bad.add(span(A.field, 4, [(1, 1, 0, 0), (0, 0, 1, 0)]))
    assert recognize_apartment(bad) is None
    assert recognize_apartment(bad, exhaustive_fallback=True) is None
    assert recognize_apartment(list(bad)[:5]) is None


def test_json():
    F = field_of_order(3)
    A = Apartment(Frame.random(F, 4, random.Random(1)), 2)
    assert Apartment.from_json(A.to_json(), F) == A
    S = complementary_subset(A, 0, 1)
    d = labels_to_json(S)
    assert d == {"labels": [[0, 2], [0, 3]]}
    assert labels_from_json(d) == S
