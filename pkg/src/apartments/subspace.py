"""Subspaces of F_q^n in canonical RREF form, plus lattice operations."""

from __future__ import annotations

import random
from itertools import combinations, product
from typing import Iterable, Sequence

from .field import FieldSpec
from .linalg import (
    DimensionError,
    Matrix,
    SemilinearMap,
    Vector,
    kernel,
    rank,
    row_basis,
)


class Subspace:
    """A subspace stored as its unique RREF basis (no zero rows).

    Two values are equal iff their RREF matrices agree, which makes
    subspaces usable as dictionary keys.
    """

    __slots__ = ("field", "n", "rows", "pivots", "_hash")

    def __init__(self, field: FieldSpec, n: int, rows: Matrix, pivots: tuple[int, ...]):
        self.field = field
        self.n = n
        self.rows = rows
        self.pivots = pivots
        self._hash = hash((n, rows))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def codim(self) -> int:
        return self.n - len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.rows == other.rows and self.n == other.n and self.field == other.field

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Subspace") -> bool:
        return (self.dim, self.rows) < (other.dim, other.rows)

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, rows={[list(r) for r in self.rows]})"

    def __contains__(self, v) -> bool:
        return contains_vector(self, v)

    def to_json(self) -> dict:
        return {"n": self.n, "dim": self.dim, "rref": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, d: dict, F: FieldSpec) -> "Subspace":
        rows = tuple(tuple(int(x) for x in r) for r in d["rref"])
        n = int(d["n"])
        s = span(F, n, rows)
        if s.rows != rows or s.dim != int(d["dim"]):
            raise ValueError("subspace JSON rows are not in canonical RREF form")
        return s

    def points(self) -> list["Subspace"]:
        """All 1-dimensional subspaces of self."""
        return subspaces_of(self, 1)


def _check(X: Subspace, Y: Subspace) -> None:
    if X.n != Y.n or X.field != Y.field:
        raise DimensionError("subspaces live in different ambient spaces")


def span(F: FieldSpec, n: int, vectors: Iterable[Sequence[int]]) -> Subspace:
    vecs = [tuple(v) for v in vectors]
    for v in vecs:
        if len(v) != n:
            raise DimensionError(f"vector of length {len(v)} in F^{n}")
    rows, piv = row_basis(F, vecs, n) if vecs else ((), ())
    return Subspace(F, n, rows, piv)


def zero(F: FieldSpec, n: int) -> Subspace:
    return Subspace(F, n, (), ())


def full(F: FieldSpec, n: int) -> Subspace:
    return span(F, n, [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)])


def coordinate(F: FieldSpec, n: int, idx: Iterable[int]) -> Subspace:
    """span(e_i : i in idx), 0-based indices."""
    return span(F, n, [tuple(1 if i == j else 0 for j in range(n)) for i in idx])


def sum_(X: Subspace, Y: Subspace) -> Subspace:
    _check(X, Y)
    return span(X.field, X.n, X.rows + Y.rows)


join = sum_


def annihilator(X: Subspace) -> Subspace:
    """{y : y . x = 0 for all x in X} under the standard dot product."""
    if not X.rows:
        return full(X.field, X.n)
    return span(X.field, X.n, kernel(X.field, X.rows, X.n))


def intersect(X: Subspace, Y: Subspace) -> Subspace:
    """X meet Y as the kernel of the stacked annihilator equations."""
    _check(X, Y)
    if not X.rows or not Y.rows:
        return zero(X.field, X.n)
    eqs = kernel(X.field, X.rows, X.n) + kernel(Y.field, Y.rows, Y.n)
    if not eqs:
        return X
    return span(X.field, X.n, kernel(X.field, eqs, X.n))


def intersect_all(spaces: Iterable[Subspace]) -> Subspace:
    it = iter(spaces)
    acc = next(it)
    eqs = list(kernel(acc.field, acc.rows, acc.n)) if acc.rows else None
    if eqs is None:
        return acc
    for Y in it:
        if not Y.rows:
            return Y
        eqs.extend(kernel(Y.field, Y.rows, Y.n))
    if not eqs:
        return acc
    return span(acc.field, acc.n, kernel(acc.field, eqs, acc.n))


def sum_all(spaces: Iterable[Subspace]) -> Subspace:
    spaces = list(spaces)
    X = spaces[0]
    return span(X.field, X.n, [r for S in spaces for r in S.rows])


def contains(X: Subspace, Y: Subspace) -> bool:
    """True iff Y is a subspace of X."""
    _check(X, Y)
    if Y.dim > X.dim:
        return False
    if not Y.rows:
        return True
    return rank(X.field, X.rows + Y.rows) == X.dim


def contains_vector(X: Subspace, v: Sequence[int]) -> bool:
    if not any(v):
        return True
    return rank(X.field, X.rows + (tuple(v),)) == X.dim


def is_hyperplane_of(X: Subspace, Y: Subspace) -> bool:
    """True iff X is a subspace of Y of codimension one."""
    _check(X, Y)
    return Y.dim == X.dim + 1 and contains(Y, X)


def image(l: SemilinearMap, X: Subspace) -> Subspace:
    if l.n != X.n or l.field != X.field:
        raise DimensionError("map and subspace live in different spaces")
    return span(X.field, X.n, [l(r) for r in X.rows])


def representative(P: Subspace) -> Vector:
    """The canonical spanning vector of a 1-dimensional subspace."""
    if P.dim != 1:
        raise DimensionError("representative() needs a 1-dimensional subspace")
    return P.rows[0]


def rref_matrices(F: FieldSpec, n: int, k: int):
    """Yield every k x n matrix of rank k in RREF (all k-subspaces of F^n)."""
    for piv in combinations(range(n), k):
        pset = set(piv)
        free = [(r, c) for r, p in enumerate(piv) for c in range(p + 1, n) if c not in pset]
        for vals in product(range(F.q), repeat=len(free)):
            m = [[0] * n for _ in range(k)]
            for r, p in enumerate(piv):
                m[r][p] = 1
            for (r, c), v in zip(free, vals):
                m[r][c] = v
            yield tuple(tuple(row) for row in m)


def subspaces_of(X: Subspace, d: int) -> list[Subspace]:
    """All d-dimensional subspaces of X, sorted canonically."""
    F, k = X.field, X.dim
    if not 0 <= d <= k:
        return []
    out = []
    for coeffs in rref_matrices(F, k, d):
        vecs = []
        for c in coeffs:
            v = [0] * X.n
            for a, row in zip(c, X.rows):
                if a:
                    ma = F.mul_table[a]
                    v = [F.add_table[x][ma[y]] for x, y in zip(v, row)]
            vecs.append(v)
        out.append(span(F, X.n, vecs))
    out.sort()
    return out


def superspaces_of(X: Subspace, d: int) -> list[Subspace]:
    """All d-dimensional subspaces containing X, sorted canonically."""
    F, n, k = X.field, X.n, X.dim
    if not k <= d <= n:
        return []
    comp = [c for c in range(n) if c not in X.pivots]
    out = []
    for coeffs in rref_matrices(F, n - k, d - k):
        vecs = list(X.rows)
        for c in coeffs:
            v = [0] * n
            for a, col in zip(c, comp):
                v[col] = a
            vecs.append(v)
        out.append(span(F, n, vecs))
    out.sort()
    return out


def random_subspace(F: FieldSpec, n: int, d: int, rng: random.Random) -> Subspace:
    while True:
        vecs = [tuple(rng.randrange(F.q) for _ in range(n)) for _ in range(d)]
        S = span(F, n, vecs)
        if S.dim == d:
            return S


def subspace_from_json(d: dict, F: FieldSpec) -> Subspace:
    return Subspace.from_json(d, F)


__all__ = [
    "Subspace", "span", "zero", "full", "coordinate", "sum_", "join", "intersect",
    "intersect_all", "sum_all", "contains", "contains_vector", "is_hyperplane_of",
    "annihilator", "image", "representative", "subspaces_of", "superspaces_of",
    "random_subspace", "rref_matrices",
]
