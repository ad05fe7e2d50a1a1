"""Grassmannians G_k(F_q^n), the Grassmann graph and its clique geometry."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import GuardError, TypeFlipError
from .field import FieldSpec, field_of_order, get_field
from .linalg import DimensionError, SemilinearMap, rank
from .subspace import (
    Subspace,
    contains,
    image,
    intersect,
    rref_matrices,
    subspaces_of,
    superspaces_of,
)

DEFAULT_MAX_ELEMENTS = 20_000


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """[n choose k]_q by the q-factorial product formula."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


class Grassmannian:
    """All k-subspaces of F_q^n in canonical (lexicographic RREF) order."""

    def __init__(self, n: int, k: int, field: FieldSpec, elements: Sequence[Subspace]):
        self.n, self.k, self.field = n, k, field
        self.elements = tuple(elements)
        self.index = {X: i for i, X in enumerate(self.elements)}
        self._stars = None
        self._tops = None

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> Subspace:
        return self.elements[i]

    def __contains__(self, X: Subspace) -> bool:
        return X in self.index

    def __repr__(self) -> str:
        return f"Grassmannian(n={self.n}, k={self.k}, q={self.field.q}, size={len(self)})"

    def ordinal(self, X: Subspace) -> int:
        return self.index[X]

    def ordinals(self, spaces: Iterable[Subspace]) -> frozenset[int]:
        return frozenset(self.index[X] for X in spaces)

    def star_index(self) -> dict[Subspace, frozenset[int]]:
        """Map each (k-1)-subspace W to the ordinals of star(W)."""
        if self._stars is None:
            acc: dict[Subspace, set[int]] = {}
            for i, X in enumerate(self.elements):
                for W in subspaces_of(X, self.k - 1):
                    acc.setdefault(W, set()).add(i)
            self._stars = {W: frozenset(s) for W, s in sorted(acc.items())}
        return self._stars

    def top_index(self) -> dict[Subspace, frozenset[int]]:
        """Map each (k+1)-subspace Y to the ordinals of top(Y)."""
        if self._tops is None:
            acc: dict[Subspace, set[int]] = {}
            for i, X in enumerate(self.elements):
                for Y in superspaces_of(X, self.k + 1):
                    acc.setdefault(Y, set()).add(i)
            self._tops = {Y: frozenset(s) for Y, s in sorted(acc.items())}
        return self._tops


@lru_cache(maxsize=64)
def _enumerate(n: int, k: int, F: FieldSpec) -> Grassmannian:
    from .subspace import span

    elems = [span(F, n, m) for m in rref_matrices(F, n, k)]
    elems.sort()
    return Grassmannian(n, k, F, elems)


def enumerate_grassmannian(n: int, k: int, F: FieldSpec, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Grassmannian:
    if not 0 <= k <= n:
        raise DimensionError(f"need 0 <= k <= n, got n={n}, k={k}")
    size = gaussian_binomial(n, k, F.q)
    if size > max_elements:
        raise GuardError(
            f"G_{k}(F_{F.q}^{n}) has {size} elements, above the guard max_elements={max_elements}"
        )
    return _enumerate(n, k, F)


def adjacent(X: Subspace, Y: Subspace) -> bool:
    """dim(X meet Y) = k - 1 for k-subspaces X, Y."""
    if X.dim != Y.dim:
        raise DimensionError("adjacency is defined for subspaces of equal dimension")
    if X.n != Y.n:
        raise DimensionError("subspaces live in different ambient spaces")
    return rank(X.field, X.rows + Y.rows) == X.dim + 1


def star(X: Subspace) -> frozenset[Subspace]:
    """All subspaces containing X as a hyperplane."""
    if X.dim >= X.n:
        raise DimensionError("star needs dim X < n")
    return frozenset(superspaces_of(X, X.dim + 1))


def top(Y: Subspace) -> frozenset[Subspace]:
    """All hyperplanes of Y."""
    if Y.dim < 1:
        raise DimensionError("top needs dim Y >= 1")
    return frozenset(subspaces_of(Y, Y.dim - 1))


def line(X: Subspace, Y: Subspace) -> frozenset[Subspace]:
    """All Z with X < Z < Y, for dim Y = dim X + 2; empty if X is not in Y."""
    if Y.dim != X.dim + 2:
        raise DimensionError("line(X, Y) needs dim Y = dim X + 2")
    if not contains(Y, X):
        return frozenset()
    return frozenset(Z for Z in superspaces_of(X, X.dim + 1) if contains(Y, Z))


class GrassmannianBijection:
    """A permutation of the canonical ordinals of a Grassmannian."""

    __slots__ = ("G", "perm")

    def __init__(self, G: Grassmannian, perm: Sequence[int]):
        perm = tuple(perm)
        if len(perm) != len(G) or sorted(perm) != list(range(len(G))):
            raise ValueError("perm is not a bijection of the Grassmannian")
        self.G = G
        self.perm = perm

    @classmethod
    def identity(cls, G: Grassmannian) -> "GrassmannianBijection":
        return cls(G, range(len(G)))

    @classmethod
    def from_function(cls, G: Grassmannian, fn: Callable[[Subspace], Subspace]) -> "GrassmannianBijection":
        return cls(G, [G.index[fn(X)] for X in G.elements])

    @classmethod
    def from_semilinear(cls, l: SemilinearMap, G: Grassmannian) -> "GrassmannianBijection":
        return cls.from_function(G, lambda X: image(l, X))

    def __call__(self, X: Subspace) -> Subspace:
        return self.G.elements[self.perm[self.G.index[X]]]

    def __eq__(self, other) -> bool:
        return isinstance(other, GrassmannianBijection) and self.G is other.G and self.perm == other.perm

    def __hash__(self) -> int:
        return hash(self.perm)

    def image_ordinals(self, ordinals: Iterable[int]) -> frozenset[int]:
        p = self.perm
        return frozenset(p[i] for i in ordinals)

    def inverse(self) -> "GrassmannianBijection":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return GrassmannianBijection(self.G, inv)

    def compose(self, other: "GrassmannianBijection") -> "GrassmannianBijection":
        """self after other."""
        return GrassmannianBijection(self.G, [self.perm[j] for j in other.perm])

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))

    def agrees_with(self, l: SemilinearMap) -> Subspace | None:
        """First element where l disagrees with self, or None."""
        for X in self.G.elements:
            if image(l, X) != self(X):
                return X
        return None

    def to_json(self) -> dict:
        G = self.G
        return {"n": G.n, "k": G.k, "q": G.field.q, "field": G.field.to_json(), "perm": list(self.perm)}

    @classmethod
    def from_json(cls, d: dict) -> "GrassmannianBijection":
        if "field" in d:
            F = FieldSpec.from_json(d["field"])
        else:
            F = field_of_order(int(d["q"]))
        G = enumerate_grassmannian(int(d["n"]), int(d["k"]), F)
        return cls(G, [int(x) for x in d["perm"]])


class GrassmannGraph:
    """Gamma(G_k): vertices are ordinals, adjacency stored as int bitsets."""

    def __init__(self, G: Grassmannian):
        self.G = G
        adj = [0] * len(G)
        if 1 <= G.k <= G.n - 1:
            for members in G.star_index().values():
                mask = 0
                for i in members:
                    mask |= 1 << i
                for i in members:
                    adj[i] |= mask
            for i in range(len(G)):
                adj[i] &= ~(1 << i)
        self.adj = adj

    def __len__(self) -> int:
        return len(self.adj)

    def neighbors(self, i: int) -> list[int]:
        return _bits(self.adj[i])

    def is_adjacent(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(len(self.adj)) for j in _bits(self.adj[i]) if i < j]

    def distances_from(self, src: int) -> list[int]:
        dist = [-1] * len(self.adj)
        dist[src] = 0
        frontier, seen, d = 1 << src, 1 << src, 0
        while frontier:
            d += 1
            nxt = 0
            for i in _bits(frontier):
                nxt |= self.adj[i]
            nxt &= ~seen
            for i in _bits(nxt):
                dist[i] = d
            seen |= nxt
            frontier = nxt
        return dist

    def is_connected(self) -> bool:
        return all(d >= 0 for d in self.distances_from(0)) if self.adj else True

    def is_automorphism(self, f: GrassmannianBijection) -> bool:
        return self.adjacency_violation(f.perm) is None

    def adjacency_violation(self, perm: Sequence[int]) -> tuple[int, int] | None:
        """A pair (i, j) whose adjacency perm does not preserve, or None."""
        inv = {t: s for s, t in enumerate(perm)}
        for i, nb in enumerate(self.adj):
            img = 0
            for j in _bits(nb):
                img |= 1 << perm[j]
            diff = img ^ self.adj[perm[i]]
            if diff:
                t = (diff & -diff).bit_length() - 1
                return (i, inv[t])
        return None

    def to_json(self) -> dict:
        G = self.G
        return {"n": G.n, "k": G.k, "q": G.field.q, "edges": [list(e) for e in self.edges()]}

    def to_dot(self) -> str:
        G = self.G
        lines = [f'graph "Gamma(G_{G.k}(F_{G.field.q}^{G.n}))" {{']
        for i, X in enumerate(G.elements):
            tip = ";".join("".join(str(x) for x in r) for r in X.rows)
            lines.append(f'  {i} [label="{i}", tooltip="{tip}"];')
        for i, j in self.edges():
            lines.append(f"  {i} -- {j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@lru_cache(maxsize=32)
def grassmann_graph(G: Grassmannian) -> GrassmannGraph:
    return GrassmannGraph(G)


def bron_kerbosch(adj: Sequence[int]) -> list[int]:
    """All maximal cliques (as bitmasks) by pivoting Bron-Kerbosch, sorted."""
    out: list[int] = []

    def expand(R: int, P: int, X: int) -> None:
        if not P and not X:
            out.append(R)
            return
        pu = P | X
        # pivot maximizing |P & N(u)|
        best, pivot = -1, 0
        for u in _bits(pu):
            c = (P & adj[u]).bit_count()
            if c > best:
                best, pivot = c, u
        for v in _bits(P & ~adj[pivot]):
            bit = 1 << v
            expand(R | bit, P & adj[v], X & adj[v])
            P &= ~bit
            X |= bit

    n = len(adj)
    expand(0, (1 << n) - 1 if n else 0, 0)
    out.sort()
    return out


@dataclass(frozen=True)
class Clique:
    kind: str  # "star", "top" or "other"
    members: frozenset[int]
    anchor: Subspace | None = None

    def elements(self, G: Grassmannian) -> frozenset[Subspace]:
        return frozenset(G.elements[i] for i in self.members)


def classify_clique(G: Grassmannian, members: frozenset[int]) -> Clique:
    """Tag a clique as star(center), top(ceiling) or other.

    The degenerate cases k in {1, n-1} (complete graph) are tagged other.
    """
    if not 2 <= G.k <= G.n - 2:
        return Clique("other", members)
    stars = {v: W for W, v in G.star_index().items()}
    if members in stars:
        return Clique("star", members, stars[members])
    tops = {v: Y for Y, v in G.top_index().items()}
    if members in tops:
        return Clique("top", members, tops[members])
    return Clique("other", members)


def maximal_cliques(graph: GrassmannGraph, max_vertices: int = 2_000) -> list[Clique]:
    if len(graph) > max_vertices:
        raise GuardError(f"clique enumeration limited to {max_vertices} vertices, graph has {len(graph)}")
    G = graph.G
    return [classify_clique(G, frozenset(_bits(m))) for m in bron_kerbosch(graph.adj)]


def induce_on_adjacent_grassmannian(f: GrassmannianBijection, direction: str = "down") -> GrassmannianBijection:
    """The bijection g of G_{k-1} (down) or G_{k+1} (up) with f(star W) = star g(W)
    (resp. f(top Y) = top g(Y)).

    Raises TypeFlipError when a star goes to a top or vice versa.
    """
    G = f.G
    F, n, k = G.field, G.n, G.k
    if direction == "down":
        if k < 1:
            raise DimensionError("cannot descend below G_0")
        own, other = G.star_index(), G.top_index()
        H = enumerate_grassmannian(n, k - 1, F)
        kinds = ("star", "top")
    elif direction == "up":
        if k > n - 1:
            raise DimensionError("cannot ascend above G_n")
        own, other = G.top_index(), G.star_index()
        H = enumerate_grassmannian(n, k + 1, F)
        kinds = ("top", "star")
    else:
        raise ValueError("direction must be 'down' or 'up'")
    rev_own = {v: W for W, v in own.items()}
    rev_other = {v: W for W, v in other.items()}
    perm = [0] * len(H)
    for W, members in own.items():
        img = f.image_ordinals(members)
        if img in rev_own:
            perm[H.index[W]] = H.index[rev_own[img]]
        elif img in rev_other:
            raise TypeFlipError(
                f"star/top type flip: the {kinds[0]} of {W} maps to the {kinds[1]} of {rev_other[img]}"
            )
        else:
            raise ValueError(f"image of the {kinds[0]} of {W} is not a {kinds[0]}")
    return GrassmannianBijection(H, perm)


def field_from_q(q: int, p: int | None = None, e: int | None = None, modulus=None) -> FieldSpec:
    if p is not None:
        return get_field(p, e or 1, tuple(modulus) if modulus else None)
    return field_of_order(q)
