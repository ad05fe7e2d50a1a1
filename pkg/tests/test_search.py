from __future__ import annotations

from itertools import combinations, permutations

import numpy as np
import pytest

from apartments.errors import GuardError
from apartments.field import field_of_order
from apartments.grassmann import enumerate_grassmannian
from apartments.search import ApartmentHypergraph, apartment_hypergraph, search_apartment_preservers


def brute_force(V, edges):
    E = {frozenset(e) for e in edges}
    return sum(all(frozenset(p[v] for v in e) in E for e in E) for p in permutations(range(V)))


@pytest.mark.parametrize("V,edges", [
    (6, [(i, (i + 1) % 6) for i in range(6)]),                       # hexagon: dihedral, 12
    (5, list(combinations(range(5), 2))),                            # complete graph: 120
    (6, [(0, 1, 2), (1, 2, 3), (3, 4, 5), (0, 4, 5)]),
    (7, [(0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 0), (5, 6, 1), (6, 0, 2)]),  # Fano lines: 168
    (6, [(0, 1), (2, 3), (4, 5)]),
])
def test_against_brute_force(V, edges):
    res = search_apartment_preservers(ApartmentHypergraph(V, edges))
    assert res.count == brute_force(V, edges)
    assert res.stats.rejected_leaves == 0 or res.stats.leaves >= res.count
    assert len({tuple(p) for p in res.perms}) == res.count


def test_first_apartment_ordering_is_irrelevant():
    edges = [(0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 0), (5, 6, 1), (6, 0, 2)]
    H = ApartmentHypergraph(7, edges)
    a = search_apartment_preservers(H, first_apartment=True)
    b = search_apartment_preservers(H, first_apartment=False, batch=3)
    assert np.array_equal(a.perms, b.perms)


def test_verify_masks():
    H = ApartmentHypergraph(4, [(0, 1), (2, 3)])
    perms = np.array([[0, 1, 2, 3], [1, 0, 3, 2], [0, 2, 1, 3], [2, 3, 0, 1]])
    assert H.verify(perms).tolist() == [True, True, False, True]


def test_guard():
    with pytest.raises(GuardError):
        ApartmentHypergraph(65, [(0, 1)])


@pytest.mark.parametrize("n,k,q,count", [(3, 1, 2, 168), (3, 2, 2, 168), (3, 1, 3, 5616)])
def test_small_censuses(n, k, q, count):
    G = enumerate_grassmannian(n, k, field_of_order(q))
    res = search_apartment_preservers(apartment_hypergraph(G))
    assert res.count == count
    assert res.perms[0].tolist() == list(range(len(G)))  # sorted, identity first
