"""Recovering the semilinear map behind an apartment-preserving bijection.

Routes: the projective-geometry base case on points (k = 1), the
hyperplane procedure (k = n - 1), and for 2 <= k <= n - 2 a descent through
stars to G_1 followed by a level-by-level lift of the recovered map.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .apartment import DEFAULT_MAX_FRAMES, Apartment, Frame, enumerate_frames, frame_count, recognize_apartment
from .checks import Verdict
from .errors import GuardError, ReconstructionError, TypeFlipError
from .field import FieldSpec, aut_from_table
from .grassmann import (
    Grassmannian,
    GrassmannianBijection,
    enumerate_grassmannian,
    grassmann_graph,
    induce_on_adjacent_grassmannian,
)
from .linalg import SemilinearMap, inverse, mat_vec, rank, solve, transpose
from .subspace import Subspace, annihilator, contains, image, intersect, intersect_all, span, subspaces_of

DEFAULT_APARTMENT_SAMPLES = 200
DEFAULT_GLUE_PAIRS = 500


# --- apartment preservation -----------------------------------------------


@lru_cache(maxsize=32)
def _apartment_ordinals_cached(n: int, k: int, F: FieldSpec, max_frames: int) -> tuple[tuple[int, ...], ...]:
    G = enumerate_grassmannian(n, k, F)
    out = []
    for pts in enumerate_frames(F, n, max_frames):
        vecs = [P.rows[0] for P in pts]
        out.append(tuple(sorted(G.index[span(F, n, [vecs[j] for j in J])] for J in combinations(range(n), k))))
    return tuple(out)


def apartment_ordinals(G: Grassmannian, max_frames: int = DEFAULT_MAX_FRAMES) -> tuple[tuple[int, ...], ...]:
    """Every apartment of G as a sorted tuple of element ordinals."""
    return _apartment_ordinals_cached(G.n, G.k, G.field, max_frames)


def preserves_apartments(f: GrassmannianBijection, mode: str = "sampled", samples: int = DEFAULT_APARTMENT_SAMPLES,
                         rng: random.Random | None = None, max_frames: int = DEFAULT_MAX_FRAMES) -> Verdict:
    """Whether f and f^-1 send apartments to apartments.

    The witness on failure is the offending source apartment (as a frame)
    and the direction in which it failed.
    """
    G = f.G
    inv = f.inverse()
    if mode == "exhaustive":
        if frame_count(G.n, G.field.q) > max_frames:
            raise GuardError(
                f"exhaustive mode needs {frame_count(G.n, G.field.q)} frames (max_frames={max_frames}); use mode='sampled'"
            )
        apts = apartment_ordinals(G, max_frames)
        known = set(apts)
        for direction, g in (("forward", f), ("inverse", inv)):
            for a in apts:
                if tuple(sorted(g.image_ordinals(a))) not in known:
                    return Verdict(False, {"direction": direction, "apartment": [G[i].to_json() for i in a]},
                                   {"mode": mode, "checked": len(apts)})
        return Verdict(True, None, {"mode": mode, "checked": len(apts)})
    if mode != "sampled":
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    rng = rng or random.Random(0)
    for t in range(samples):
        A = Apartment(Frame.random(G.field, G.n, rng), G.k)
        for direction, g in (("forward", f), ("inverse", inv)):
            if recognize_apartment(g(X) for X in A.element_set) is None:
                return Verdict(False, {"direction": direction, "frame": A.frame.to_json()},
                               {"mode": mode, "checked": t + 1})
    return Verdict(True, None, {"mode": mode, "checked": samples})


# --- points: the projective-geometry base case ----------------------------


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def ftpg_reconstruct(f: GrassmannianBijection) -> SemilinearMap:
    """The semilinear map inducing a collineation f of the points of F^n, n >= 3."""
    G = f.G
    F, n = G.field, G.n
    if G.k != 1:
        raise ValueError("ftpg_reconstruct needs a bijection of points (k = 1)")
    if n < 3:
        raise ValueError("point reconstruction needs n >= 3; every bijection of a projective line qualifies")
    pt = lambda v: span(F, n, [v])
    cols = [f(pt(_unit(n, i))).rows[0] for i in range(n)]
    if rank(F, cols) != n:
        raise ReconstructionError("ftpg", "images of the standard frame are dependent")
    u = f(pt(tuple([1] * n))).rows[0]
    c = solve(F, transpose(tuple(cols)), u)
    if not all(c):
        raise ReconstructionError("ftpg", "unit point image lies on a coordinate hyperplane of the frame image",
                                  witness=list(u))
    M = transpose(tuple(tuple(F.mul(ci, x) for x in col) for ci, col in zip(c, cols)))
    Minv = inverse(F, M)
    sigma = None
    probed = False
    for i, j in [(a, b) for a in range(n) for b in range(n) if a != b]:
        table = [0] * F.q
        good = True
        for a in F.elements():
            v = list(_unit(n, i))
            v[j] = a
            y = mat_vec(F, Minv, f(pt(tuple(v))).rows[0])
            if not y[i] or any(y[t] for t in range(n) if t not in (i, j)):
                good = False
                break
            table[a] = F.div(y[j], y[i])
        if good:
            probed = True
            sigma = aut_from_table(F, table)
            break
    if not probed:
        raise ReconstructionError("ftpg", "not induced by any semilinear map: pencil probes are not collinear")
    if sigma is None:
        raise ReconstructionError("ftpg", "not induced by any semilinear map: recovered sigma is not a field automorphism",
                                  witness=table)
    l = SemilinearMap(M, sigma)
    bad = f.agrees_with(l)
    if bad is not None:
        raise ReconstructionError("ftpg", "not induced by any semilinear map: final check failed",
                                  witness=bad.to_json())
    return l


# --- hyperplanes ----------------------------------------------------------


def _frame_through(P: Subspace, rng: random.Random | None = None) -> Frame:
    """A frame whose first vector spans P; deterministic unless rng is given."""
    if rng is not None:
        return Frame.through(P, rng)
    F, n = P.field, P.n
    vecs = [P.rows[0]]
    for i in range(n):
        e = _unit(n, i)
        if rank(F, vecs + [e]) == len(vecs) + 1:
            vecs.append(e)
    return Frame(F, tuple(vecs))


def hyperplane_point_image(f: GrassmannianBijection, P: Subspace, frame: Frame) -> Subspace:
    """Meet of f(Y) over the apartment elements Y containing P, where the
    frame's first vector spans P."""
    G = f.G
    A = Apartment(frame, G.n - 1)
    others = [Y for J, Y in A.elements.items() if 0 in J]
    Pp = intersect_all(f(Y) for Y in others)
    if Pp.dim != 1:
        raise ReconstructionError("hyperplane", f"meet of f(A minus X) has dimension {Pp.dim}, not 1",
                                  witness=P.to_json())
    return Pp


def hyperplane_point_map(f: GrassmannianBijection, rng: random.Random | None = None) -> GrassmannianBijection:
    G = f.G
    P1 = enumerate_grassmannian(G.n, 1, G.field)
    imgs = [P1.index[hyperplane_point_image(f, P, _frame_through(P, rng))] for P in P1.elements]
    try:
        return GrassmannianBijection(P1, imgs)
    except ValueError:
        raise ReconstructionError("hyperplane", "induced point map is not a bijection") from None


def hyperplane_independence(f: GrassmannianBijection, rng: random.Random, points: int | None = None,
                            frames_per_point: int = 2) -> Verdict:
    """Check that P' does not depend on the frame through P."""
    G = f.G
    P1 = enumerate_grassmannian(G.n, 1, G.field).elements
    sample = P1 if points is None or points >= len(P1) else rng.sample(list(P1), points)
    for P in sample:
        imgs = {hyperplane_point_image(f, P, _frame_through(P, rng)) for _ in range(frames_per_point)}
        imgs.add(hyperplane_point_image(f, P, _frame_through(P)))
        if len(imgs) != 1:
            return Verdict(False, {"point": P.to_json(), "images": [Q.to_json() for Q in sorted(imgs)]})
    return Verdict(True, None, {"points": len(sample)})


def hyperplane_reconstruct(f: GrassmannianBijection, rng: random.Random | None = None) -> SemilinearMap:
    G = f.G
    if G.k != G.n - 1:
        raise ValueError("hyperplane_reconstruct needs k = n - 1")
    g = hyperplane_point_map(f, rng)
    l = ftpg_reconstruct(g)
    bad = f.agrees_with(l)
    if bad is not None:
        raise ReconstructionError("hyperplane", "recovered map does not induce f on hyperplanes",
                                  witness=bad.to_json())
    return l


def annihilator_transport(f: GrassmannianBijection) -> GrassmannianBijection:
    """X -> ann f(ann X), acting on G_{n-k}."""
    G = f.G
    H = enumerate_grassmannian(G.n, G.n - G.k, G.field)
    return GrassmannianBijection.from_function(H, lambda X: annihilator(f(annihilator(X))))


def dual_ftpg_reconstruct(f: GrassmannianBijection) -> SemilinearMap:
    """Reconstruct f on hyperplanes through the point collineation ann f ann."""
    if f.G.k != f.G.n - 1:
        raise ValueError("dual route needs k = n - 1")
    return ftpg_reconstruct(annihilator_transport(f)).contragredient()


# --- general k ------------------------------------------------------------


@dataclass
class ReconstructionResult:
    """``map`` induces f, or when ``duality`` is set, f(X) = map(ann X)."""

    map: SemilinearMap
    duality: bool = False
    certificate: dict = field(default_factory=dict)

    def apply(self, X: Subspace) -> Subspace:
        return image(self.map, annihilator(X) if self.duality else X)

    def to_json(self) -> dict:
        return {"map": self.map.to_json(), "duality": self.duality, "certificate": self.certificate}


def dualize(f: GrassmannianBijection) -> GrassmannianBijection:
    """X -> ann f(X); a bijection of G_k when n = 2k."""
    G = f.G
    if 2 * G.k != G.n:
        raise ValueError("dualize needs n = 2k")
    return GrassmannianBijection.from_function(G, lambda X: annihilator(f(X)))


def _level_apartments_ok(g: GrassmannianBijection, samples: int, rng: random.Random) -> bool:
    if samples <= 0 or g.G.k in (0, g.G.n):
        return True
    return bool(preserves_apartments(g, "sampled", samples, rng))


def _descend(f: GrassmannianBijection, samples: int, rng: random.Random) -> list[GrassmannianBijection]:
    chain = [f]
    while chain[-1].G.k > 1:
        try:
            g = induce_on_adjacent_grassmannian(chain[-1], "down")
        except TypeFlipError as exc:
            raise ReconstructionError("descent", str(exc)) from None
        except ValueError as exc:
            raise ReconstructionError("descent", str(exc)) from None
        if not _level_apartments_ok(g, samples, rng):
            raise ReconstructionError("descent", f"induced map on G_{g.G.k} breaks an apartment")
        chain.append(g)
    return chain


def reconstruct(f: GrassmannianBijection, check_apartments: str | None = "sampled",
                apartment_samples: int = DEFAULT_APARTMENT_SAMPLES, level_samples: int = 10,
                rng: random.Random | None = None) -> ReconstructionResult:
    G = f.G
    n, k = G.n, G.k
    rng = rng or random.Random(0)
    cert: dict = {"n": n, "k": k, "q": G.field.q}
    if not 1 <= k <= n - 1:
        raise ValueError("reconstruct needs 1 <= k <= n - 1")
    if check_apartments:
        v = preserves_apartments(f, check_apartments, apartment_samples, rng)
        cert["apartments"] = {"mode": check_apartments, "checked": v.details.get("checked"), "ok": v.ok}
        if not v:
            raise ReconstructionError("apartments", "f does not preserve apartments", witness=v.witness)
    if k == 1:
        l = ftpg_reconstruct(f)
        cert.update(route="points", levels=[1])
        return _finish(f, l, False, cert)
    if k == n - 1:
        l = hyperplane_reconstruct(f, None)
        cert.update(route="hyperplane", levels=[n - 1, 1])
        return _finish(f, l, False, cert)

    bad = grassmann_graph(G).adjacency_violation(f.perm)
    cert["graph_automorphism"] = bad is None
    if bad is not None:
        raise ReconstructionError("graph", "f is not an automorphism of the Grassmann graph",
                                  witness=[G[bad[0]].to_json(), G[bad[1]].to_json()])
    duality = False
    g = f
    try:
        induce_on_adjacent_grassmannian(f, "down")
    except TypeFlipError as exc:
        if 2 * k != n:
            raise ReconstructionError("stars", str(exc)) from None
        duality = True
        g = dualize(f)
    chain = _descend(g, level_samples, rng)
    l = ftpg_reconstruct(chain[-1])
    for h in reversed(chain):
        bad = h.agrees_with(l)
        if bad is not None:
            raise ReconstructionError(f"lift G_{h.G.k}", "recovered map disagrees with the induced map",
                                      witness=bad.to_json())
    cert.update(route="stars", levels=[h.G.k for h in chain])
    if duality:
        l = l.contragredient()
    return _finish(f, l, duality, cert)


def _finish(f: GrassmannianBijection, l: SemilinearMap, duality: bool, cert: dict) -> ReconstructionResult:
    res = ReconstructionResult(l, duality, cert)
    for X in f.G.elements:
        if res.apply(X) != f(X):
            raise ReconstructionError("final", "recovered map does not induce f", witness=X.to_json())
    cert["duality"] = duality
    cert["extension_factor"] = 2 if duality else 1
    cert["sigma_power"] = l.aut.power
    cert["verified_elements"] = len(f.G)
    return res


def induce(l: SemilinearMap, G: Grassmannian, duality: bool = False) -> GrassmannianBijection:
    if duality:
        return GrassmannianBijection.from_function(G, lambda X: image(l, annihilator(X)))
    return GrassmannianBijection.from_semilinear(l, G)


# --- local gluing ---------------------------------------------------------


def local_point_image(f: GrassmannianBijection, X: Subspace, P: Subspace,
                      cache: dict | None = None) -> Subspace:
    """h_X(P): the point f induces on P using only stars inside X.

    Each (k-1)-subspace W of X through P contributes the meet of f over
    star(W); h_X(P) is the meet of these contributions.
    """
    G = f.G
    if G.k == 1:
        return f(P)
    stars = G.star_index()
    cache = {} if cache is None else cache
    hyperplanes = [W for W in subspaces_of(X, G.k - 1) if contains(W, P)]
    parts = []
    for W in hyperplanes:
        if W not in cache:
            cache[W] = intersect_all(G[i] for i in f.image_ordinals(stars[W]))
        parts.append(cache[W])
    return intersect_all(parts)


def local_glue_check(f: GrassmannianBijection, l: SemilinearMap, pairs: int = DEFAULT_GLUE_PAIRS,
                     rng: random.Random | None = None, duality: bool = False) -> Verdict:
    """Compare h_X(P), h_Y(P) and l(P) for P in X meet Y over sampled pairs.

    With ``duality`` the check runs on X -> ann f(X), which is induced by
    the contragredient of l.
    """
    rng = rng or random.Random(0)
    G = f.G
    if duality:
        f = dualize(f)
        l = l.contragredient()
    els = G.elements
    cache: dict = {}
    checked = skipped = 0
    while checked < pairs:
        X, Y = rng.choice(els), rng.choice(els)
        if X == Y and G.k > 1:
            continue
        Z = intersect(X, Y)
        if Z.dim == 0:
            skipped += 1
            if skipped > 100 * pairs:
                break
            continue
        pts = Z.points()
        for P in pts if len(pts) <= 8 else rng.sample(pts, 8):
            hx = local_point_image(f, X, P, cache)
            hy = local_point_image(f, Y, P, cache)
            lp = image(l, P)
            if not (hx == hy == lp):
                return Verdict(False, {"X": X.to_json(), "Y": Y.to_json(), "P": P.to_json(),
                                       "h_X": hx.to_json(), "h_Y": hy.to_json(), "l(P)": lp.to_json()},
                               {"pairs": checked, "skipped_zero_meet": skipped})
        checked += 1
    return Verdict(checked >= pairs, None, {"pairs": checked, "skipped_zero_meet": skipped})


def corrupt(l: SemilinearMap, rng: random.Random) -> SemilinearMap:
    """Change one matrix entry, keeping the matrix invertible and the map
    projectively different."""
    F = l.field
    n = l.n
    while True:
        r, c = rng.randrange(n), rng.randrange(n)
        new = rng.randrange(F.q)
        if new == l.matrix[r][c]:
            continue
        m = [list(row) for row in l.matrix]
        m[r][c] = new
        m = tuple(tuple(row) for row in m)
        if rank(F, m) == n:
            cand = SemilinearMap(m, l.aut)
            if not cand.projectively_equal(l):
                return cand


def random_semilinear(F: FieldSpec, n: int, rng: random.Random, nontrivial_aut: bool = False) -> SemilinearMap:
    if nontrivial_aut and F.e > 1:
        return SemilinearMap.random(F, n, rng, F.frobenius(rng.randrange(1, F.e)))
    return SemilinearMap.random(F, n, rng)


__all__ = [
    "preserves_apartments", "apartment_ordinals", "ftpg_reconstruct", "hyperplane_reconstruct",
    "hyperplane_point_map", "hyperplane_point_image", "hyperplane_independence", "dual_ftpg_reconstruct",
    "annihilator_transport", "reconstruct", "ReconstructionResult", "dualize", "induce",
    "local_glue_check", "local_point_image", "corrupt", "random_semilinear",
]
