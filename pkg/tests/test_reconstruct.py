from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from apartments.errors import GuardError, ReconstructionError
from apartments.field import field_of_order
from apartments.grassmann import GrassmannianBijection, enumerate_grassmannian, adjacent
from apartments.linalg import SemilinearMap
from apartments.reconstruct import (
    annihilator_transport,
    corrupt,
    dual_ftpg_reconstruct,
    dualize,
    ftpg_reconstruct,
    hyperplane_independence,
    hyperplane_point_map,
    hyperplane_reconstruct,
    induce,
    local_glue_check,
    local_point_image,
    preserves_apartments,
    random_semilinear,
    reconstruct,
)
from apartments.subspace import annihilator, image

CASES = [(3, 1, 2), (3, 2, 2), (4, 1, 2), (4, 2, 2), (4, 3, 2), (5, 2, 2),
         (3, 1, 3), (3, 2, 3), (4, 2, 3), (3, 1, 4), (3, 2, 4)]


@settings(max_examples=25)
@given(st.sampled_from(CASES), st.integers(0, 2**32 - 1))
def test_roundtrip(case, seed):
    n, k, q = case
    F = field_of_order(q)
    rng = random.Random(seed)
    G = enumerate_grassmannian(n, k, F)
    l0 = random_semilinear(F, n, rng, nontrivial_aut=bool(seed % 2))
    res = reconstruct(induce(l0, G), apartment_samples=5, rng=rng)
    assert not res.duality
    assert res.map.projectively_equal(l0)
    assert res.certificate["verified_elements"] == len(G)


@pytest.mark.parametrize("n,k,q", [(4, 2, 2), (4, 2, 3), (6, 3, 2)])
def test_duality_roundtrip(n, k, q):
    F = field_of_order(q)
    rng = random.Random(n + q)
    G = enumerate_grassmannian(n, k, F)
    l0 = random_semilinear(F, n, rng)
    f = induce(l0, G, duality=True)
    res = reconstruct(f, apartment_samples=5, rng=rng)
    assert res.duality and res.certificate["extension_factor"] == 2
    assert res.map.projectively_equal(l0)
    for X in G.elements[:50]:
        assert res.apply(X) == f(X) == image(l0, annihilator(X))


def test_frobenius_over_f4():
    F = field_of_order(4)
    G = enumerate_grassmannian(3, 1, F)
    l0 = SemilinearMap.identity(F, 3).compose(SemilinearMap(((1, 0, 0), (0, 1, 0), (0, 0, 1)), F.frobenius(1)))
    res = reconstruct(induce(l0, G), check_apartments="exhaustive")
    assert res.certificate["sigma_power"] == 1
    assert not res.map.aut.is_identity()
    assert res.map.projectively_equal(l0)
    # the linear part alone does not induce the collineation
    assert induce(SemilinearMap.identity(F, 3), G) != induce(l0, G)


def test_uniqueness_up_to_scalar():
    F = field_of_order(3)
    G = enumerate_grassmannian(4, 2, F)
    rng = random.Random(1)
    l0 = random_semilinear(F, 4, rng)
    scaled = SemilinearMap(tuple(tuple(F.mul(2, x) for x in row) for row in l0.matrix), l0.aut)
    assert induce(l0, G) == induce(scaled, G)
    assert reconstruct(induce(scaled, G), apartment_samples=3).map.projectively_equal(l0)
    other = random_semilinear(F, 4, rng)
    if not other.projectively_equal(l0):
        assert induce(other, G) != induce(l0, G)


def test_functoriality():
    F = field_of_order(4)
    G = enumerate_grassmannian(4, 2, F)
    rng = random.Random(7)
    a, b = random_semilinear(F, 4, rng, True), random_semilinear(F, 4, rng, True)
    fa, fb = induce(a, G), induce(b, G)
    la = reconstruct(fa, apartment_samples=3).map
    lb = reconstruct(fb, apartment_samples=3).map
    lab = reconstruct(fa.compose(fb), apartment_samples=3).map
    assert lab.projectively_equal(la.compose(lb))
    assert reconstruct(fa.inverse(), apartment_samples=3).map.projectively_equal(la.inverse())


def _transposition(G, adjacent_pair: bool):
    els = G.elements
    X = els[0]
    Y = next(Z for Z in els[1:] if adjacent(X, Z) == adjacent_pair)
    perm = list(range(len(G)))
    i, j = G.index[X], G.index[Y]
    perm[i], perm[j] = j, i
    return GrassmannianBijection(G, perm)


def test_transposition_rejected_with_witness():
    G = enumerate_grassmannian(4, 2, field_of_order(2))
    for adj in (False, True):
        f = _transposition(G, adj)
        v = preserves_apartments(f, "exhaustive")
        assert not v.ok and v.witness["direction"] in ("forward", "inverse")
        assert len(v.witness["apartment"]) == 6
        with pytest.raises(ReconstructionError) as exc:
            reconstruct(f, check_apartments="exhaustive")
        assert exc.value.stage == "apartments" and exc.value.witness is not None


def test_transposition_rejected_downstream_without_apartment_check():
    G = enumerate_grassmannian(4, 2, field_of_order(2))
    with pytest.raises(ReconstructionError) as exc:
        reconstruct(_transposition(G, False), check_apartments=None)
    assert exc.value.stage == "graph"
    H = enumerate_grassmannian(3, 1, field_of_order(2))
    with pytest.raises(ReconstructionError, match="not induced by any semilinear map"):
        ftpg_reconstruct(_transposition(H, True))


def test_projective_line_not_reconstructable():
    G = enumerate_grassmannian(2, 1, field_of_order(3))
    with pytest.raises(ValueError, match="n >= 3"):
        ftpg_reconstruct(GrassmannianBijection.identity(G))


def test_exhaustive_guard():
    F = field_of_order(4)
    G = enumerate_grassmannian(4, 2, F)
    with pytest.raises(GuardError, match="sampled"):
        preserves_apartments(GrassmannianBijection.identity(G), "exhaustive", max_frames=1000)
    assert preserves_apartments(GrassmannianBijection.identity(G), "sampled", samples=5).ok


def test_sampled_apartment_check_catches_random_permutation():
    G = enumerate_grassmannian(4, 2, field_of_order(2))
    rng = random.Random(0)
    perm = list(range(len(G)))
    rng.shuffle(perm)
    v = preserves_apartments(GrassmannianBijection(G, perm), "sampled", samples=20, rng=rng)
    assert not v.ok and "frame" in v.witness


@pytest.mark.parametrize("n,q", [(3, 2), (4, 2), (3, 3), (3, 4)])
def test_hyperplane_procedure(n, q):
    F = field_of_order(q)
    rng = random.Random(n * q)
    G = enumerate_grassmannian(n, n - 1, F)
    l0 = random_semilinear(F, n, rng, nontrivial_aut=True)
    f = induce(l0, G)
    assert hyperplane_independence(f, rng, frames_per_point=3).ok
    pm = hyperplane_point_map(f, rng)
    assert pm == induce(l0, pm.G)
    l1 = hyperplane_reconstruct(f, rng)
    l2 = dual_ftpg_reconstruct(f)
    assert l1.projectively_equal(l2) and l1.projectively_equal(l0)
    assert annihilator_transport(f) == induce(l0.contragredient(), enumerate_grassmannian(n, 1, F))


def test_dualize_requires_half():
    G = enumerate_grassmannian(5, 2, field_of_order(2))
    with pytest.raises(ValueError):
        dualize(GrassmannianBijection.identity(G))


@pytest.mark.parametrize("n,k,q", [(3, 1, 2), (4, 2, 2), (4, 3, 3), (4, 2, 4)])
def test_local_glue_and_corruption(n, k, q):
    F = field_of_order(q)
    rng = random.Random(3)
    G = enumerate_grassmannian(n, k, F)
    l0 = random_semilinear(F, n, rng, nontrivial_aut=True)
    f = induce(l0, G)
    assert local_glue_check(f, l0, 100, rng).ok
    v = local_glue_check(f, corrupt(l0, rng), 100, rng)
    assert not v.ok and set(v.witness) == {"X", "Y", "P", "h_X", "h_Y", "l(P)"}


def test_local_glue_duality():
    F = field_of_order(3)
    G = enumerate_grassmannian(4, 2, F)
    l0 = random_semilinear(F, 4, random.Random(2))
    f = induce(l0, G, duality=True)
    res = reconstruct(f, apartment_samples=3)
    # the map is passed in the same convention as ReconstructionResult
    assert local_glue_check(f, l0, 100, duality=True).ok
    assert local_glue_check(f, res.map, 50, duality=True).ok
    assert not local_glue_check(f, corrupt(l0, random.Random(4)), 100, duality=True).ok


def test_local_point_image_inside_x():
    F = field_of_order(2)
    G = enumerate_grassmannian(4, 2, F)
    l0 = random_semilinear(F, 4, random.Random(5))
    f = induce(l0, G)
    X = G.elements[3]
    for P in X.points():
        assert local_point_image(f, X, P) == image(l0, P)


def test_certificate_json():
    import json
    F = field_of_order(2)
    G = enumerate_grassmannian(5, 2, F)
    res = reconstruct(induce(random_semilinear(F, 5, random.Random(0)), G), apartment_samples=3)
    d = json.loads(json.dumps(res.to_json()))
    assert d["certificate"]["route"] == "stars" and d["certificate"]["levels"] == [2, 1]
    assert SemilinearMap.from_json(d["map"]).projectively_equal(res.map)
