"""Apartments of G_k(F_q^n) and the label calculus on them.

An apartment is built from a frame (an ordered basis, read up to scalars)
and indexes its C(n, k) elements by the k-subsets J of ``range(n)``: the
element labeled J is spanned by the frame vectors e_j, j in J.  Labels are
sorted tuples of 0-based indices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, permutations
from math import comb, factorial
from typing import Hashable, Iterable, Iterator, Sequence

from .errors import GuardError
from .field import FieldSpec
from .grassmann import bron_kerbosch, enumerate_grassmannian
from .linalg import Vector, rank, random_vector, row_basis, vec_add, vec_scale
from .subspace import Subspace, contains_vector, intersect, span

Label = tuple[int, ...]
LabelSet = frozenset  # frozenset[Label]

DEFAULT_MAX_FRAMES = 100_000
DEFAULT_MAX_SCAN_ELEMENTS = 12


@dataclass(frozen=True)
class Frame:
    """An ordered basis of F_q^n; only the lines it spans matter geometrically."""

    field: FieldSpec
    vectors: tuple[Vector, ...]

    def __post_init__(self):
        n = len(self.vectors)
        if any(len(v) != n for v in self.vectors):
            raise ValueError("a frame of F^n needs n vectors of length n")
        if rank(self.field, self.vectors) != n:
            raise ValueError("frame vectors are linearly dependent")

    @property
    def n(self) -> int:
        return len(self.vectors)

    @property
    def lines(self) -> tuple[Subspace, ...]:
        return tuple(span(self.field, self.n, [v]) for v in self.vectors)

    def line_set(self) -> frozenset[Subspace]:
        return frozenset(self.lines)

    @classmethod
    def standard(cls, F: FieldSpec, n: int) -> "Frame":
        return cls(F, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def random(cls, F: FieldSpec, n: int, rng: random.Random) -> "Frame":
        while True:
            vecs = tuple(random_vector(F, n, rng) for _ in range(n))
            if rank(F, vecs) == n:
                return cls(F, vecs)

    @classmethod
    def through(cls, P: Subspace, rng: random.Random) -> "Frame":
        """A random frame whose first vector spans the point P."""
        F, n = P.field, P.n
        while True:
            vecs = (P.rows[0],) + tuple(random_vector(F, n, rng) for _ in range(n - 1))
            if rank(F, vecs) == n:
                return cls(F, vecs)

    def rescaled(self, scalars: Sequence[int]) -> "Frame":
        return Frame(self.field, tuple(vec_scale(self.field, c, v) for c, v in zip(scalars, self.vectors)))

    def elementary(self, i: int, j: int, c: int) -> "Frame":
        """Replace e_i by e_i + c e_j."""
        vecs = list(self.vectors)
        vecs[i] = vec_add(self.field, vecs[i], vec_scale(self.field, c, vecs[j]))
        return Frame(self.field, tuple(vecs))

    def to_json(self) -> list[list[int]]:
        return [list(v) for v in self.vectors]

    @classmethod
    def from_json(cls, F: FieldSpec, rows) -> "Frame":
        return cls(F, tuple(tuple(int(x) for x in r) for r in rows))


class Apartment:
    """The C(n, k) elements spanned by k-subsets of a frame, with labels."""

    def __init__(self, frame: Frame, k: int):
        n = frame.n
        if not 0 < k < n:
            raise ValueError(f"apartments need 0 < k < n, got k={k}, n={n}")
        self.frame, self.k, self.n, self.field = frame, k, n, frame.field
        self.labels: tuple[Label, ...] = tuple(combinations(range(n), k))
        self.elements: dict[Label, Subspace] = {
            J: span(frame.field, n, [frame.vectors[j] for j in J]) for J in self.labels
        }
        self.label_of: dict[Subspace, Label] = {X: J for J, X in self.elements.items()}
        if len(self.label_of) != len(self.labels):  # pragma: no cover - rank check prevents it
            raise ValueError("frame produced coinciding apartment elements")
        self.element_set = frozenset(self.label_of)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, X: Subspace) -> bool:
        return X in self.label_of

    def __eq__(self, other) -> bool:
        return isinstance(other, Apartment) and self.element_set == other.element_set

    def __hash__(self) -> int:
        return hash(self.element_set)

    def __repr__(self) -> str:
        return f"Apartment(n={self.n}, k={self.k}, frame={self.frame.to_json()})"

    def subspaces(self, labels: Iterable[Label]) -> frozenset[Subspace]:
        return frozenset(self.elements[tuple(J)] for J in labels)

    def labels_of(self, spaces: Iterable[Subspace]) -> frozenset[Label]:
        out = set()
        for X in spaces:
            if X not in self.label_of:
                raise ValueError(f"{X} is not an element of the apartment")
            out.add(self.label_of[X])
        return frozenset(out)

    def all_labels(self) -> frozenset[Label]:
        return frozenset(self.labels)

    def to_json(self) -> dict:
        return {"frame": self.frame.to_json(), "k": self.k}

    @classmethod
    def from_json(cls, d: dict, F: FieldSpec) -> "Apartment":
        return cls(Frame.from_json(F, d["frame"]), int(d["k"]))


def apartment_from_frame(frame: Frame, k: int) -> Apartment:
    return Apartment(frame, k)


def labels_to_json(labels: Iterable[Label]) -> dict:
    return {"labels": [list(J) for J in sorted(labels)]}


def labels_from_json(d: dict) -> frozenset[Label]:
    return frozenset(tuple(sorted(int(i) for i in J)) for J in d["labels"])


# --- label calculus -------------------------------------------------------


def _all_labels(n: int, k: int) -> list[Label]:
    return list(combinations(range(n), k))


def simple_subsets(A: Apartment, i: int) -> tuple[frozenset[Label], frozenset[Label]]:
    """(A(+i), A(-i)): elements containing / not containing e_i."""
    if not 0 <= i < A.n:
        raise IndexError(f"frame index {i} out of range")
    plus = frozenset(J for J in A.labels if i in J)
    return plus, A.all_labels() - plus


def complementary_subset(A: Apartment, i: int, j: int) -> frozenset[Label]:
    """A(+i, -j): elements containing e_i but not e_j."""
    if i == j:
        raise ValueError("complementary subsets need i != j")
    return frozenset(J for J in A.labels if i in J and j not in J)


def maximal_inexact_subset(A: Apartment, i: int, j: int) -> frozenset[Label]:
    """A(+i, +j) | A(-i), the complement of A(+i, -j)."""
    return A.all_labels() - complementary_subset(A, i, j)


def ordered_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def structural_maximal_inexact(A: Apartment) -> dict[tuple[int, int], frozenset[Label]]:
    return {(i, j): maximal_inexact_subset(A, i, j) for i, j in ordered_pairs(A.n)}


def complementary_adjacent(c1: tuple[int, int], c2: tuple[int, int]) -> bool:
    """Label rule for distinct complementary subsets A(+i,-j), A(+i',-j')."""
    (i, j), (i2, j2) = c1, c2
    if c1 == c2:
        raise ValueError("adjacency is defined for distinct complementary subsets")
    return i == i2 or j == j2


# --- inexactness ----------------------------------------------------------


def _as_subspaces(A: Apartment, X) -> list[Subspace]:
    out = []
    for x in X:
        if isinstance(x, Subspace):
            if x not in A:
                raise ValueError(f"{x} is not an element of the apartment")
            out.append(x)
        else:
            J = tuple(x)
            if J not in A.elements:
                raise ValueError(f"label {J} is not a label of the apartment")
            out.append(A.elements[J])
    return out


def structural_witness(A: Apartment, X) -> Apartment | None:
    """An apartment != A containing X among the frames e_i -> e_i + c e_j."""
    spaces = _as_subspaces(A, X)
    F = A.field
    for i, j in ordered_pairs(A.n):
        for c in F.nonzero():
            B = Apartment(A.frame.elementary(i, j, c), A.k)
            if B != A and all(x in B for x in spaces):
                return B
    return None


def _points(X: Subspace) -> list[Subspace]:
    return X.points()


def partial_frames(spaces: Sequence[Subspace], k: int) -> Iterator[tuple[Subspace, ...]]:
    """Every set T of independent points, each lying in some element of
    ``spaces``, such that every element contains exactly k points of T.

    These are exactly the traces on the elements of all frames whose
    apartment contains ``spaces``.  Sets may be yielded more than once.
    """
    if not spaces:
        yield ()
        return
    F, n = spaces[0].field, spaces[0].n
    pts = [_points(E) for E in spaces]
    pt_sets = [set(p) for p in pts]

    def rec(idx: int, T: tuple[Subspace, ...], basis: tuple) -> Iterator[tuple[Subspace, ...]]:
        if idx == len(spaces):
            yield T
            return
        have = sum(1 for P in T if P in pt_sets[idx])
        need = k - have
        if need < 0:
            return
        if need == 0:
            yield from rec(idx + 1, T, basis)
            return
        cands = [P for P in pts[idx] if P not in T and not (basis and contains_vector(_span_rows(F, n, basis), P.rows[0]))]
        for combo in combinations(cands, need):
            rows = basis + tuple(P.rows[0] for P in combo)
            if rank(F, rows) == len(rows):
                red, _ = row_basis(F, rows, n)
                yield from rec(idx + 1, T + combo, red)

    yield from rec(0, (), ())


def _span_rows(F: FieldSpec, n: int, rows) -> Subspace:
    return Subspace(F, n, rows, ())


def _complete_frame(F: FieldSpec, n: int, T: Sequence[Subspace], avoid: frozenset[Subspace]) -> Frame:
    """Extend the points T to a frame using at least one point outside ``avoid``
    whenever |T| < n."""
    vecs = [P.rows[0] for P in T]
    points = enumerate_grassmannian(n, 1, F).elements
    first = True
    for P in points:
        if len(vecs) == n:
            break
        if first and P in avoid:
            continue
        if rank(F, vecs + [P.rows[0]]) == len(vecs) + 1:
            vecs.append(P.rows[0])
            first = False
    return Frame(F, tuple(vecs))


def exhaustive_witness(A: Apartment, X) -> Apartment | None:
    """Complete search for an apartment != A containing X (or None)."""
    spaces = sorted(set(_as_subspaces(A, X)))
    lines = A.frame.line_set()
    for T in partial_frames(spaces, A.k):
        if len(T) < A.n or not set(T) <= lines:
            B = Apartment(_complete_frame(A.field, A.n, T, lines), A.k)
            assert B != A and all(x in B for x in spaces)
            return B
    return None


def is_inexact(A: Apartment, X, oracle: bool = False) -> tuple[bool, Apartment | None]:
    """Whether some apartment other than A contains X, with a witness.

    The default mode only tries the structural witnesses e_i -> e_i + c e_j,
    which suffice for every subset of a maximal inexact subset; ``oracle``
    switches to the complete search.
    """
    if oracle:
        w = exhaustive_witness(A, X)
    else:
        w = structural_witness(A, X)
    return w is not None, w


def maximal_inexact_subsets_bruteforce(A: Apartment, max_elements: int = DEFAULT_MAX_SCAN_ELEMENTS) -> list[frozenset[Label]]:
    """All inclusion-maximal inexact subsets of A, by a full subset scan
    using only the exhaustive oracle."""
    m = len(A.labels)
    if m > max_elements:
        raise GuardError(f"subset scan needs C(n,k) <= {max_elements}, got {m}")
    labels = A.labels
    full = (1 << m) - 1
    inexact_cover: list[int] = []  # masks of A meet B for found witnesses B
    exact: list[int] = []
    status: dict[int, bool] = {}

    def mask_of(B: Apartment) -> int:
        return sum(1 << t for t, J in enumerate(labels) if A.elements[J] in B)

    def check(mask: int) -> bool:
        if mask in status:
            return status[mask]
        if any(mask & e == e for e in exact):
            status[mask] = False
            return False
        if any(mask & c == mask for c in inexact_cover):
            status[mask] = True
            return True
        X = [labels[t] for t in range(m) if mask >> t & 1]
        w = exhaustive_witness(A, X)
        if w is None:
            exact.append(mask)
            status[mask] = False
        else:
            inexact_cover.append(mask_of(w))
            status[mask] = True
        return status[mask]

    out = []
    for size in range(m, -1, -1):
        for idx in combinations(range(m), size):
            mask = sum(1 << t for t in idx)
            if not check(mask):
                continue
            if all(not check(mask | 1 << t) for t in range(m) if not mask >> t & 1):
                out.append(frozenset(labels[t] for t in idx))
    return sorted(out, key=lambda s: sorted(s))


# --- complementary subsets, label-free ------------------------------------


def intersection_maximal_adjacency(family: Sequence[frozenset]) -> set[tuple[int, int]]:
    """Pairs (a, b), a < b, whose intersection is inclusion-maximal among
    intersections of distinct members."""
    m = len(family)
    inter = {(a, b): family[a] & family[b] for a in range(m) for b in range(a + 1, m)}
    vals = list(inter.values())
    return {p for p, s in inter.items() if not any(s < t for t in vals)}


def codisjoint_adjacency(family: Sequence[frozenset]) -> set[tuple[int, int]]:
    """Pairs (a, b), a < b, of intersecting members sharing the largest
    number of common disjoint members."""
    m = len(family)
    disj = [frozenset(c for c in range(m) if c != a and not (family[a] & family[c])) for a in range(m)]
    scores = {}
    for a in range(m):
        for b in range(a + 1, m):
            if family[a] & family[b]:
                scores[(a, b)] = len(disj[a] & disj[b])
    if not scores:
        return set()
    best = max(scores.values())
    return {p for p, s in scores.items() if s == best}


def maximal_adjacent_collections(m: int, adjacency: set[tuple[int, int]]) -> list[frozenset[int]]:
    adj = [0] * m
    for a, b in adjacency:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    return [frozenset(t for t in range(m) if mask >> t & 1) for mask in bron_kerbosch(adj)]


def recover_simple_subsets(collection: Iterable[frozenset], n: int, k: int,
                           adjacency: str = "codisjoint") -> list[frozenset]:
    """The 2n simple subsets, as unions of maximal mutually-adjacent
    collections of complementary subsets given as plain element sets.

    ``adjacency`` selects the label-free adjacency test: ``"codisjoint"``
    (valid for every 2 <= k <= n-2) or ``"intersection"`` (inclusion-maximal
    intersections; breaks down when k = 2 or k = n - 2).
    """
    if not 1 < k < n - 1:
        raise ValueError("machinery requires 1 < k < n-1")
    family = sorted({frozenset(c) for c in collection}, key=lambda s: sorted(map(repr, s)))
    if len(family) != n * (n - 1):
        raise ValueError(f"expected {n * (n - 1)} complementary subsets, got {len(family)}")
    if adjacency == "codisjoint":
        adj = codisjoint_adjacency(family)
    elif adjacency == "intersection":
        adj = intersection_maximal_adjacency(family)
    else:
        raise ValueError("adjacency must be 'codisjoint' or 'intersection'")
    unions = []
    for coll in maximal_adjacent_collections(len(family), adj):
        u = frozenset().union(*(family[c] for c in coll))
        if u not in unions:
            unions.append(u)
    if len(unions) != 2 * n:
        raise ValueError(f"recovered {len(unions)} unions instead of {2 * n} simple subsets")
    return unions


def different_types_by_intersection(S: frozenset, T: frozenset, complementary: Iterable[frozenset]) -> bool:
    """Label-free type test: S, T have different types iff S & T is empty or
    a complementary subset."""
    inter = S & T
    return not inter or inter in set(map(frozenset, complementary))


# --- frames and apartments of the whole Grassmannian ----------------------


def frame_count(n: int, q: int) -> int:
    """Number of frames of F_q^n: |GL(n,q)| / (n! (q-1)^n)."""
    gl = 1
    for i in range(n):
        gl *= q**n - q**i
    return gl // (factorial(n) * (q - 1) ** n)


def enumerate_frames(F: FieldSpec, n: int, max_frames: int = DEFAULT_MAX_FRAMES) -> Iterator[tuple[Subspace, ...]]:
    """Every frame as a sorted tuple of n independent points."""
    count = frame_count(n, F.q)
    if count > max_frames:
        raise GuardError(f"F_{F.q}^{n} has {count} frames, above the guard max_frames={max_frames}")
    points = enumerate_grassmannian(n, 1, F).elements

    def rec(start: int, chosen: tuple, basis: tuple):
        if len(chosen) == n:
            yield chosen
            return
        for t in range(start, len(points) - (n - len(chosen)) + 1):
            v = points[t].rows[0]
            rows = basis + (v,)
            if rank(F, rows) == len(rows):
                red, _ = row_basis(F, rows, n)
                yield from rec(t + 1, chosen + (points[t],), red)

    yield from rec(0, (), ())


def frame_from_points(points: Sequence[Subspace]) -> Frame:
    P = points[0]
    return Frame(P.field, tuple(p.rows[0] for p in points))


def all_apartments(F: FieldSpec, n: int, k: int, max_frames: int = DEFAULT_MAX_FRAMES) -> list[Apartment]:
    return [Apartment(frame_from_points(T), k) for T in enumerate_frames(F, n, max_frames)]


def common_apartment(X: Subspace, Y: Subspace) -> Apartment:
    """An apartment containing both X and Y."""
    if X.dim != Y.dim:
        raise ValueError("common_apartment needs subspaces of equal dimension")
    F, n, k = X.field, X.n, X.dim
    vecs: list[Vector] = list(intersect(X, Y).rows)
    std = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    for source in (X.rows, Y.rows, std):
        for v in source:
            if len(vecs) == n:
                break
            if rank(F, vecs + [v]) == len(vecs) + 1:
                vecs.append(v)
    return Apartment(Frame(F, tuple(vecs)), k)


def recognize_apartment(spaces: Iterable[Subspace], exhaustive_fallback: bool = False,
                        max_frames: int = DEFAULT_MAX_FRAMES) -> Frame | None:
    """The frame of the apartment equal to ``spaces``, or None.

    Candidate frame lines are the 1-dimensional members of the closure of
    ``spaces`` under intersection.
    """
    S = frozenset(spaces)
    if not S:
        return None
    X0 = next(iter(S))
    F, n, k = X0.field, X0.n, X0.dim
    if any(X.dim != k for X in S) or not 0 < k < n or len(S) != comb(n, k):
        return None
    if k == 1:
        cands = set(S)
    else:
        closure = set(S)
        frontier = set(S)
        while frontier:
            new = set()
            for a in frontier:
                for b in closure:
                    c = intersect(a, b)
                    if c.dim > 0 and c not in closure:
                        new.add(c)
            closure |= new
            frontier = new
        cands = {c for c in closure if c.dim == 1}
    if len(cands) == n:
        try:
            frame = frame_from_points(sorted(cands))
        except ValueError:
            frame = None
        if frame is not None and Apartment(frame, k).element_set == S:
            return frame
    if exhaustive_fallback:
        for T in enumerate_frames(F, n, max_frames):
            fr = frame_from_points(T)
            if Apartment(fr, k).element_set == S:
                return fr
    return None


def is_apartment(spaces: Iterable[Subspace]) -> bool:
    return recognize_apartment(spaces) is not None


def label_permutation_image(J: Label, delta: Sequence[int]) -> Label:
    return tuple(sorted(delta[j] for j in J))


def all_label_permutations(n: int) -> Iterator[tuple[int, ...]]:
    return permutations(range(n))


Element = Hashable
