"""Vectors, matrices and semilinear maps over a :class:`FieldSpec`.

Vectors are tuples of field ints; matrices are tuples of row tuples.  Matrices
act on column vectors.  A semilinear map ``(M, sigma)`` sends ``v`` to
``M @ sigma(v)``: the automorphism is applied to the coordinates first, then
the matrix.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .field import FieldAut, FieldSpec, get_field

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]


class DimensionError(ValueError):
    pass


class RREF(NamedTuple):
    matrix: Matrix
    rank: int
    pivots: tuple[int, ...]


def rref(F: FieldSpec, m: Sequence[Sequence[int]], ncols: int | None = None) -> RREF:
    """Reduced row echelon form; zero rows are kept at the bottom."""
    rows = [list(r) for r in m]
    nr = len(rows)
    nc = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    add, mul, neg, inv = F.add_table, F.mul_table, F.neg_table, F.inv_table
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        piv = r
        while piv < nr and not rows[piv][c]:
            piv += 1
        if piv == nr:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        if pr[c] != 1:
            ms = mul[inv[pr[c]]]
            pr = [ms[x] for x in pr]
            rows[r] = pr
        for i in range(nr):
            if i != r:
                x = rows[i][c]
                if x:
                    mf = mul[neg[x]]
                    rows[i] = [add[a][mf[b]] for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return RREF(tuple(tuple(row) for row in rows), r, tuple(pivots))


def row_basis(F: FieldSpec, vectors: Sequence[Sequence[int]], n: int) -> tuple[Matrix, tuple[int, ...]]:
    """Canonical (RREF, nonzero rows only) basis of the span of ``vectors``."""
    res = rref(F, vectors, n)
    return res.matrix[: res.rank], res.pivots


def rank(F: FieldSpec, m: Sequence[Sequence[int]]) -> int:
    return rref(F, m).rank


def kernel(F: FieldSpec, m: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis of {v : m v = 0}, one row per free column."""
    red, r, piv = rref(F, m, ncols)
    free = [c for c in range(ncols) if c not in piv]
    neg = F.neg_table
    out = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = neg[red[i][f]]
        out.append(tuple(v))
    return tuple(out)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def mat_vec(F: FieldSpec, m: Matrix, v: Sequence[int]) -> Vector:
    add, mul = F.add_table, F.mul_table
    out = []
    for row in m:
        s = 0
        for a, b in zip(row, v):
            if a and b:
                s = add[s][mul[a][b]]
        out.append(s)
    return tuple(out)


def mat_mul(F: FieldSpec, a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(_dot(F, row, col) for col in bt) for row in a)


def _dot(F: FieldSpec, u: Sequence[int], v: Sequence[int]) -> int:
    add, mul = F.add_table, F.mul_table
    s = 0
    for a, b in zip(u, v):
        if a and b:
            s = add[s][mul[a][b]]
    return s


dot = _dot


def scale(F: FieldSpec, c: int, m: Matrix) -> Matrix:
    mc = F.mul_table[c]
    return tuple(tuple(mc[x] for x in row) for row in m)


def vec_add(F: FieldSpec, u: Sequence[int], v: Sequence[int]) -> Vector:
    add = F.add_table
    return tuple(add[a][b] for a, b in zip(u, v))


def vec_scale(F: FieldSpec, c: int, v: Sequence[int]) -> Vector:
    mc = F.mul_table[c]
    return tuple(mc[x] for x in v)


def apply_aut(sigma: FieldAut, m):
    """Entrywise automorphism of a vector or matrix."""
    t = sigma.table()
    if m and isinstance(m[0], (tuple, list)):
        return tuple(tuple(t[x] for x in row) for row in m)
    return tuple(t[x] for x in m)


def inverse(F: FieldSpec, m: Matrix) -> Matrix:
    n = len(m)
    aug = [tuple(row) + tuple(1 if i == j else 0 for j in range(n)) for i, row in enumerate(m)]
    red, _, piv = rref(F, aug, 2 * n)
    if piv[:n] != tuple(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular")
    return tuple(row[n:] for row in red)


def solve(F: FieldSpec, m: Matrix, b: Sequence[int]) -> Vector:
    """The unique x with m x = b for invertible m."""
    return mat_vec(F, inverse(F, m), b)


def random_invertible(F: FieldSpec, n: int, rng: random.Random) -> Matrix:
    """Uniform element of GL(n, q) by rejection on the rank."""
    while True:
        m = tuple(tuple(rng.randrange(F.q) for _ in range(n)) for _ in range(n))
        if rank(F, m) == n:
            return m


def random_vector(F: FieldSpec, n: int, rng: random.Random, nonzero: bool = False) -> Vector:
    while True:
        v = tuple(rng.randrange(F.q) for _ in range(n))
        if not nonzero or any(v):
            return v


def matrix_to_json(m: Matrix) -> dict:
    return {"rows": len(m), "cols": len(m[0]) if m else 0, "entries": [list(r) for r in m]}


def matrix_from_json(d: dict) -> Matrix:
    m = tuple(tuple(int(x) for x in r) for r in d["entries"])
    if len(m) != d["rows"] or any(len(r) != d["cols"] for r in m):
        raise ValueError("matrix JSON dimensions do not match entries")
    return m


@dataclass(frozen=True)
class SemilinearMap:
    """Invertible semilinear map ``v -> matrix @ aut(v)`` of F_q^n."""

    matrix: Matrix
    aut: FieldAut

    def __post_init__(self):
        n = len(self.matrix)
        if any(len(r) != n for r in self.matrix):
            raise DimensionError("semilinear map needs a square matrix")
        if rank(self.field, self.matrix) != n:
            raise ValueError("semilinear map matrix must be invertible")

    @property
    def field(self) -> FieldSpec:
        return self.aut.field

    @property
    def n(self) -> int:
        return len(self.matrix)

    @classmethod
    def linear(cls, F: FieldSpec, matrix: Matrix) -> "SemilinearMap":
        return cls(tuple(tuple(r) for r in matrix), F.identity_aut())

    @classmethod
    def identity(cls, F: FieldSpec, n: int) -> "SemilinearMap":
        return cls(identity(n), F.identity_aut())

    @classmethod
    def random(cls, F: FieldSpec, n: int, rng: random.Random, aut: FieldAut | None = None) -> "SemilinearMap":
        m = random_invertible(F, n, rng)
        if aut is None:
            aut = F.frobenius(rng.randrange(F.e))
        return cls(m, aut)

    def __call__(self, v: Sequence[int]) -> Vector:
        if len(v) != self.n:
            raise DimensionError(f"vector of length {len(v)} for a map of F^{self.n}")
        t = self.aut.table()
        return mat_vec(self.field, self.matrix, [t[x] for x in v])

    def compose(self, other: "SemilinearMap") -> "SemilinearMap":
        """self after other: v -> self(other(v))."""
        if other.n != self.n or other.field != self.field:
            raise DimensionError("cannot compose maps of different spaces")
        m = mat_mul(self.field, self.matrix, apply_aut(self.aut, other.matrix))
        return SemilinearMap(m, self.aut.compose(other.aut))

    def inverse(self) -> "SemilinearMap":
        s = self.aut.inverse()
        return SemilinearMap(apply_aut(s, inverse(self.field, self.matrix)), s)

    def contragredient(self) -> "SemilinearMap":
        """The map sending ann(X) to ann(self(X)) for the standard dot product."""
        return SemilinearMap(transpose(inverse(self.field, self.matrix)), self.aut)

    def projectively_equal(self, other: "SemilinearMap") -> bool:
        return projectively_equal(self, other)

    def to_json(self) -> dict:
        d = matrix_to_json(self.matrix)
        d["aut_power"] = self.aut.power
        d["field"] = self.field.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict, F: FieldSpec | None = None) -> "SemilinearMap":
        if F is None:
            f = d["field"]
            F = get_field(f["p"], f.get("e", 1), tuple(f["modulus"]) if f.get("e", 1) > 1 else None)
        return cls(matrix_from_json(d), F.frobenius(int(d.get("aut_power", 0))))


def projectively_equal(l1: SemilinearMap, l2: SemilinearMap) -> bool:
    """Equal automorphisms and matrices differing by one nonzero scalar."""
    if l1.n != l2.n or l1.field != l2.field:
        raise DimensionError("maps act on different spaces")
    if l1.aut != l2.aut:
        return False
    F = l1.field
    c = None
    for r1, r2 in zip(l1.matrix, l2.matrix):
        for a, b in zip(r1, r2):
            if (a == 0) != (b == 0):
                return False
            if a:
                ratio = F.mul_table[b][F.inv_table[a]]
                if c is None:
                    c = ratio
                elif c != ratio:
                    return False
    return True
