from __future__ import annotations

import json
import random
from itertools import combinations

import pytest

from apartments.errors import GuardError, TypeFlipError
from apartments.field import field_of_order
from apartments.grassmann import (
    GrassmannianBijection,
    adjacent,
    enumerate_grassmannian,
    gaussian_binomial,
    grassmann_graph,
    induce_on_adjacent_grassmannian,
    line,
    maximal_cliques,
    star,
    top,
)
from apartments.linalg import DimensionError, SemilinearMap
from apartments.reconstruct import induce
from apartments.subspace import annihilator, coordinate, intersect


def q_factorial_binomial(n, k, q):
    """[n choose k]_q as a ratio of q-factorials (independent of the product used in the package)."""
    def qfact(m):
        out = 1
        for i in range(1, m + 1):
            out *= sum(q**j for j in range(i))
        return out
    return qfact(n) // (qfact(k) * qfact(n - k))


GRID = [(n, k, q) for q in (2, 3, 4) for n in range(1, 6) for k in range(n + 1)
        if q_factorial_binomial(n, k, q) <= 2000]


@pytest.mark.parametrize("n,k,q", GRID)
def test_counts_match_gaussian_binomial(n, k, q):
    G = enumerate_grassmannian(n, k, field_of_order(q))
    assert len(G) == q_factorial_binomial(n, k, q) == gaussian_binomial(n, k, q)
    assert len(set(G.elements)) == len(G)
    assert list(G.elements) == sorted(G.elements)
    assert all(X.dim == k for X in G.elements)


def test_count_examples():
    F2 = field_of_order(2)
    assert len(enumerate_grassmannian(3, 1, F2)) == 7
    assert len(enumerate_grassmannian(4, 2, F2)) == 35
    assert len(enumerate_grassmannian(5, 0, F2)) == 1


def test_guard_names_bound():
    with pytest.raises(GuardError, match="100"):
        enumerate_grassmannian(6, 3, field_of_order(2), max_elements=100)


def test_adjacency_examples():
    F = field_of_order(2)
    e = lambda *J: coordinate(F, 4, J)
    X = e(0, 1)
    assert not adjacent(X, X)
    assert adjacent(X, e(0, 2))
    assert not adjacent(X, e(2, 3))
    with pytest.raises(DimensionError):
        adjacent(X, e(0))


def test_star_top_line_sizes():
    F2, F3 = field_of_order(2), field_of_order(3)
    P = coordinate(F2, 4, [0])
    G = enumerate_grassmannian(4, 2, F2)
    S = G.star_index()[P]
    assert len(S) == 7
    Y = coordinate(F2, 4, [0, 1, 2])
    assert len(G.top_index()[Y]) == 7
    assert all(adjacent(G[a], G[b]) for a, b in combinations(S, 2))
    assert len(line(P, Y)) == 3
    assert len(line(coordinate(F3, 4, [0]), coordinate(F3, 4, [0, 1, 2]))) == 4
    assert line(P, coordinate(F2, 4, [1, 2, 3])) == frozenset()
    assert line(P, Y) == frozenset(G[i] for i in S) & frozenset(G[i] for i in G.top_index()[Y])


def test_star_top_functions():
    F = field_of_order(3)
    W = coordinate(F, 4, [0])
    assert all(X.dim == 2 and intersect(X, W) == W for X in star(W))
    assert len(star(W)) == gaussian_binomial(3, 1, 3)
    Y = coordinate(F, 4, [0, 1, 2])
    assert len(top(Y)) == gaussian_binomial(3, 2, 3)


@pytest.mark.parametrize("n,k,q", [(4, 2, 2), (4, 2, 3), (5, 2, 2), (3, 1, 3)])
def test_graph_properties(n, k, q):
    G = enumerate_grassmannian(n, k, field_of_order(q))
    gr = grassmann_graph(G)
    for i in range(len(G)):
        assert not gr.is_adjacent(i, i)
        for j in gr.neighbors(i):
            assert gr.is_adjacent(j, i)
    assert gr.is_connected()
    rng = random.Random(0)
    for src in rng.sample(range(len(G)), 3):
        d = gr.distances_from(src)
        for j in range(len(G)):
            assert d[j] == k - intersect(G[src], G[j]).dim
    degs = {gr.degree(i) for i in range(len(G))}
    assert len(degs) == 1


def test_vertex_transitivity_spot_check():
    F = field_of_order(3)
    G = enumerate_grassmannian(4, 2, F)
    gr = grassmann_graph(G)
    f = induce(SemilinearMap.random(F, 4, random.Random(2)), G)
    assert gr.is_automorphism(f)


def test_clique_examples():
    G = enumerate_grassmannian(4, 2, field_of_order(2))
    cl = maximal_cliques(grassmann_graph(G))
    kinds = [c.kind for c in cl]
    assert kinds.count("star") == 15 and kinds.count("top") == 15 and "other" not in kinds
    for a, b in combinations(cl, 2):
        assert len(a.members & b.members) in (0, 1, 3)
    P = enumerate_grassmannian(3, 1, field_of_order(2))
    cl = maximal_cliques(grassmann_graph(P))
    assert len(cl) == 1 and cl[0].kind == "other" and len(cl[0].members) == 7


@pytest.mark.parametrize("n,k,q", [(5, 2, 2), (4, 2, 3), (6, 3, 2)])
def test_cliques_are_stars_or_tops(n, k, q):
    G = enumerate_grassmannian(n, k, field_of_order(q))
    cl = maximal_cliques(grassmann_graph(G))
    assert sum(c.kind == "star" for c in cl) == gaussian_binomial(n, k - 1, q)
    assert sum(c.kind == "top" for c in cl) == gaussian_binomial(n, k + 1, q)
    assert all(c.kind != "other" for c in cl)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_induce_matches_semilinear_both_directions(q):
    F = field_of_order(q)
    rng = random.Random(q)
    l = SemilinearMap.random(F, 4, rng)
    G2 = enumerate_grassmannian(4, 2, F)
    f = induce(l, G2)
    down = induce_on_adjacent_grassmannian(f, "down")
    up = induce_on_adjacent_grassmannian(f, "up")
    assert down.agrees_with(l) is None and down.G.k == 1
    assert up.agrees_with(l) is None and up.G.k == 3
    back = induce_on_adjacent_grassmannian(down, "up")
    assert back == f


def test_induce_identity_and_flip():
    F = field_of_order(2)
    G = enumerate_grassmannian(4, 2, F)
    assert induce_on_adjacent_grassmannian(GrassmannianBijection.identity(G)).is_identity()
    dual = GrassmannianBijection.from_function(G, annihilator)
    with pytest.raises(TypeFlipError, match="star/top type flip"):
        induce_on_adjacent_grassmannian(dual, "down")


def test_bijection_ops_and_json():
    F = field_of_order(3)
    G = enumerate_grassmannian(3, 1, F)
    rng = random.Random(4)
    a = induce(SemilinearMap.random(F, 3, rng), G)
    b = induce(SemilinearMap.random(F, 3, rng), G)
    X = G[5]
    assert a.compose(b)(X) == a(b(X))
    assert a.compose(a.inverse()).is_identity()
    d = a.to_json()
    assert d["n"] == 3 and d["k"] == 1 and d["q"] == 3
    assert GrassmannianBijection.from_json(json.loads(json.dumps(d))) == a
    with pytest.raises(ValueError):
        GrassmannianBijection(G, [0] * len(G))


def test_exports():
    G = enumerate_grassmannian(3, 1, field_of_order(2))
    gr = grassmann_graph(G)
    d = gr.to_json()
    assert d["n"] == 3 and len(d["edges"]) == 21
    dot = gr.to_dot()
    assert dot.startswith("graph") and dot.count("--") == 21 and "tooltip" in dot
