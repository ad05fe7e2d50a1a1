"""Special bijections between apartments and their (delta, kind) classification."""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .apartment import (
    Apartment,
    Frame,
    Label,
    complementary_subset,
    maximal_inexact_subset,
    ordered_pairs,
    recover_simple_subsets,
    simple_subsets,
    structural_witness,
)
from .errors import NotSpecialError
from .field import FieldSpec
from .subspace import intersect, intersect_all

FIRST = "first"
SECOND = "second"


def _check_range(n: int, k: int) -> None:
    if not 1 < k < n - 1:
        raise ValueError("machinery requires 1 < k < n-1")


class ApartmentBijection:
    """A bijection A -> A', stored label to label."""

    def __init__(self, source: Apartment, target: Apartment, mapping: Mapping[Label, Label]):
        if (source.n, source.k, source.field) != (target.n, target.k, target.field):
            raise ValueError("source and target apartments must share n, k and field")
        m = {tuple(a): tuple(b) for a, b in mapping.items()}
        labels = set(source.labels)
        if set(m) != labels or set(m.values()) != labels:
            raise ValueError("mapping must be a bijection of the full label set")
        self.source, self.target, self.mapping = source, target, m

    @property
    def n(self) -> int:
        return self.source.n

    @property
    def k(self) -> int:
        return self.source.k

    @classmethod
    def from_subspace_map(cls, source: Apartment, target: Apartment, fn) -> "ApartmentBijection":
        """Ingest a map given on subspaces (dict or callable)."""
        get = fn.__getitem__ if isinstance(fn, Mapping) else fn
        return cls(source, target, {J: target.label_of[get(X)] for J, X in source.elements.items()})

    @classmethod
    def from_class(cls, source: Apartment, target: Apartment, delta: Sequence[int], kind: str) -> "ApartmentBijection":
        n = source.n
        out = {}
        for J in source.labels:
            img = {delta[j] for j in J}
            if kind == SECOND:
                img = set(range(n)) - img
            out[J] = tuple(sorted(img))
        if kind == SECOND and 2 * source.k != n:
            raise ValueError("second-kind bijections need n = 2k")
        return cls(source, target, out)

    def image(self, X) -> object:
        """Image of a label or of a subspace of the source."""
        if isinstance(X, tuple):
            return self.mapping[X]
        return self.target.elements[self.mapping[self.source.label_of[X]]]

    def image_set(self, labels) -> frozenset[Label]:
        return frozenset(self.mapping[J] for J in labels)

    def inverse(self) -> "ApartmentBijection":
        return ApartmentBijection(self.target, self.source, {b: a for a, b in self.mapping.items()})

    def compose(self, other: "ApartmentBijection") -> "ApartmentBijection":
        """self after other."""
        if other.target != self.source:
            raise ValueError("composition needs other.target == self.source")
        # both sides index the shared apartment by their own frame labels
        out = {}
        for J, J2 in other.mapping.items():
            X = other.target.elements[J2]
            out[J] = self.mapping[self.source.label_of[X]]
        return ApartmentBijection(other.source, self.target, out)

    def to_json(self) -> dict:
        return {
            "source_frame": self.source.frame.to_json(),
            "target_frame": self.target.frame.to_json(),
            "k": self.k,
            "pairs": [[list(a), list(self.mapping[a])] for a in sorted(self.mapping)],
        }

    @classmethod
    def from_json(cls, d: dict, F: FieldSpec) -> "ApartmentBijection":
        k = int(d["k"])
        src = Apartment(Frame.from_json(F, d["source_frame"]), k)
        tgt = Apartment(Frame.from_json(F, d["target_frame"]), k)
        pairs = {tuple(sorted(int(x) for x in a)): tuple(sorted(int(x) for x in b)) for a, b in d["pairs"]}
        return cls(src, tgt, pairs)


@dataclass(frozen=True)
class SpecialBijectionClass:
    delta: tuple[int, ...]
    kind: str

    def to_json(self) -> dict:
        return {"delta": list(self.delta), "kind": self.kind}

    def compose(self, other: "SpecialBijectionClass") -> "SpecialBijectionClass":
        """Class of g2 after g1 where self is g2's class and other is g1's."""
        delta = tuple(self.delta[other.delta[i]] for i in range(len(self.delta)))
        return SpecialBijectionClass(delta, FIRST if self.kind == other.kind else SECOND)


def maximal_inexact_family(A: Apartment) -> set[frozenset[Label]]:
    return {maximal_inexact_subset(A, i, j) for i, j in ordered_pairs(A.n)}


def is_special(g: ApartmentBijection) -> bool:
    """g and its inverse map maximal inexact subsets onto maximal inexact subsets."""
    _check_range(g.n, g.k)
    fam_s = maximal_inexact_family(g.source)
    fam_t = maximal_inexact_family(g.target)
    if any(g.image_set(X) not in fam_t for X in fam_s):
        return False
    inv = g.inverse()
    return all(inv.image_set(Y) in fam_s for Y in fam_t)


def is_special_oracle(g: ApartmentBijection, oracle: bool = True) -> bool:
    """Definition check over every subset of the source apartment.

    Exponential in C(n, k); intended to validate :func:`is_special` at
    tiny scale.
    """
    from .apartment import exhaustive_witness

    def inexact(A: Apartment, labels) -> bool:
        if oracle:
            return exhaustive_witness(A, labels) is not None
        return structural_witness(A, labels) is not None

    src_labels = g.source.labels
    memo_s: dict = {}
    memo_t: dict = {}
    for r in range(len(src_labels) + 1):
        for X in combinations(src_labels, r):
            Xs = frozenset(X)
            Ys = g.image_set(Xs)
            a = memo_s.setdefault(Xs, inexact(g.source, Xs))
            b = memo_t.setdefault(Ys, inexact(g.target, Ys))
            if a != b:
                return False
    return True


def _line_of_simple(A: Apartment, S: frozenset) -> tuple[int, str]:
    """Identify a simple subset of A given as a set of subspaces: returns
    (m, "+") for A(+m) or (m, "-") for A(-m), reading only geometry."""
    lines = A.frame.lines
    common = intersect_all(S)
    if common.dim > 0:
        for m, L in enumerate(lines):
            if L == common:
                return m, "+"
        raise NotSpecialError("not special: a recovered simple subset meets outside the frame")
    missing = [m for m, L in enumerate(lines) if not any(intersect(L, X).dim for X in S)]
    if len(missing) != 1:
        raise NotSpecialError("not special: recovered set is not a simple subset")
    return missing[0], "-"


def classify_by_procedure(g: ApartmentBijection, adjacency: str = "codisjoint") -> SpecialBijectionClass:
    """Run the classification argument without reading target labels.

    Images of complementary subsets are handled as plain sets of
    subspaces of the target; simple subsets of the target are rebuilt from
    them and named by the frame line they contain or avoid.
    """
    n, k = g.n, g.k
    _check_range(n, k)
    A, B = g.source, g.target
    whole = B.element_set
    images = {}
    for i, j in ordered_pairs(n):
        C = frozenset(g.image(A.elements[J]) for J in complementary_subset(A, i, j))
        if structural_witness(B, [B.label_of[X] for X in whole - C]) is None:
            raise NotSpecialError(f"not special: image of complementary subset ({i},{j}) is not complementary")
        images[(i, j)] = C
    unions = recover_simple_subsets(images.values(), n, k, adjacency)
    named = {U: _line_of_simple(B, U) for U in unions}
    delta = [None] * n
    kinds = set()
    for i in range(n):
        plus, minus = simple_subsets(A, i)
        gp = frozenset(g.image(A.elements[J]) for J in plus)
        gm = frozenset(g.image(A.elements[J]) for J in minus)
        if gp not in named or gm not in named:
            raise NotSpecialError(f"not special: image of simple subset for index {i} is not recovered")
        (m1, s1), (m2, s2) = named[gp], named[gm]
        if m1 != m2 or s1 == s2:
            raise NotSpecialError(f"not special: images of A(+{i}) and A(-{i}) do not pair up")
        delta[i] = m1
        kinds.add(FIRST if s1 == "+" else SECOND)
    if len(kinds) != 1:
        raise NotSpecialError("not special: simple subset types are mixed")
    if sorted(delta) != list(range(n)):
        raise NotSpecialError("not special: recovered delta is not a permutation")
    return SpecialBijectionClass(tuple(delta), kinds.pop())


def classify_by_matching(g: ApartmentBijection) -> SpecialBijectionClass:
    """Match each g(A(+i)) against the labeled simple subsets of the target."""
    n = g.n
    A, B = g.source, g.target
    table = {}
    for m in range(n):
        p, q = simple_subsets(B, m)
        table[p] = (m, FIRST)
        table.setdefault(q, (m, SECOND))
    delta = []
    kinds = set()
    for i in range(n):
        img = g.image_set(simple_subsets(A, i)[0])
        if img not in table:
            raise NotSpecialError(f"not special: g(A(+{i})) is not a simple subset")
        m, kind = table[img]
        delta.append(m)
        kinds.add(kind)
    if len(kinds) != 1 or sorted(delta) != list(range(n)):
        raise NotSpecialError("not special: delta is not a consistent permutation")
    cls = SpecialBijectionClass(tuple(delta), kinds.pop())
    if ApartmentBijection.from_class(A, B, cls.delta, cls.kind).mapping != g.mapping:
        raise NotSpecialError("not special: mapping differs from its matched class")
    return cls


def special_is_graph_isomorphism(g: ApartmentBijection, cls: SpecialBijectionClass | None = None):
    """(True, None) if g preserves adjacency both ways (and, for the first
    kind, inclusion of coordinate subspaces); otherwise (False, witness)."""
    A, B = g.source, g.target
    k = g.k
    for J1, J2 in combinations(A.labels, 2):
        a = intersect(A.elements[J1], A.elements[J2]).dim == k - 1
        X1, X2 = g.image(A.elements[J1]), g.image(A.elements[J2])
        b = intersect(X1, X2).dim == k - 1
        if a != b:
            return False, (J1, J2)
    if cls is not None and cls.kind == FIRST:
        n = g.n
        subsets = [frozenset(s) for r in range(n + 1) for s in combinations(range(n), r)]
        for s in subsets:
            for t in subsets:
                ds = frozenset(cls.delta[i] for i in s)
                dt = frozenset(cls.delta[i] for i in t)
                if (s <= t) != (ds <= dt):
                    return False, (tuple(sorted(s)), tuple(sorted(t)))
    return True, None


def random_special_bijection(source: Apartment, target: Apartment, rng: random.Random,
                             kind: str | None = None) -> tuple[ApartmentBijection, SpecialBijectionClass]:
    """A random special bijection and its class; second kind only when n = 2k."""
    n, k = source.n, source.k
    delta = list(range(n))
    rng.shuffle(delta)
    if kind is None:
        kind = rng.choice([FIRST, SECOND]) if 2 * k == n else FIRST
    cls = SpecialBijectionClass(tuple(delta), kind)
    return ApartmentBijection.from_class(source, target, cls.delta, kind), cls


def random_bijection(source: Apartment, target: Apartment, rng: random.Random) -> ApartmentBijection:
    labels = list(source.labels)
    imgs = labels[:]
    rng.shuffle(imgs)
    return ApartmentBijection(source, target, dict(zip(labels, imgs)))


def special_bijections(source: Apartment, target: Apartment) -> list[ApartmentBijection]:
    """Every special bijection, by scanning all C(n,k)! label bijections."""
    from itertools import permutations
    from math import factorial

    m = len(source.labels)
    if factorial(m) > 5_000_000:
        raise ValueError(f"{m}! label bijections is too many to scan")
    out = []
    for imgs in permutations(source.labels):
        g = ApartmentBijection(source, target, dict(zip(source.labels, imgs)))
        if is_special(g):
            out.append(g)
    return out
