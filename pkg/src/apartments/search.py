"""Backtracking enumeration of every apartment-preserving bijection of G_k.

The apartments form a uniform hypergraph on the elements of G_k and the
bijections sought are its automorphisms.  Pruning keeps, for every vertex,
a bitset of still-possible images and intersects it with the classes of
pair and triple co-occurrence counts (how many apartments contain a given
pair or triple of elements), which any automorphism must preserve.
Complete assignments are verified against the full apartment list with
numpy.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import GuardError
from .grassmann import Grassmannian

DEFAULT_MAX_VERTICES = 64


@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    rejected_leaves: int = 0
    seconds: float = 0.0


@dataclass
class SearchResult:
    perms: np.ndarray  # one row per apartment-preserving bijection
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def count(self) -> int:
        return len(self.perms)


class ApartmentHypergraph:
    def __init__(self, num_vertices: int, apartments):
        V = num_vertices
        if V > DEFAULT_MAX_VERTICES:
            raise GuardError(f"search supports at most {DEFAULT_MAX_VERTICES} elements, got {V}")
        self.V = V
        self.apts = np.array(apartments, dtype=np.int64)
        weights = np.left_shift(np.uint64(1), self.apts.astype(np.uint64))
        self.masks = np.bitwise_or.reduce(weights, axis=1)
        self.sorted_masks = np.sort(self.masks)
        self.py_masks = [int(m) for m in self.masks]
        self.mask_set = set(self.py_masks)

        pair = np.zeros((V, V), dtype=np.int64)
        triple = np.zeros((V, V, V), dtype=np.int64)
        for a in apartments:
            for u, v in combinations(a, 2):
                pair[u, v] += 1
                pair[v, u] += 1
            for u, v, w in combinations(a, 3):
                for x, y, z in ((u, v, w), (u, w, v), (v, u, w), (v, w, u), (w, u, v), (w, v, u)):
                    triple[x, y, z] += 1
        self.pair = pair.tolist()
        self.triple = triple.tolist()
        deg = np.zeros(V, dtype=np.int64)
        for a in apartments:
            for u in a:
                deg[u] += 1
        self.degree = deg.tolist()
        # pair_cls[x][c]: bitset of y with pair[x][y] == c
        self.pair_cls = [self._classes(self.pair[x]) for x in range(V)]
        self.triple_cls = [[self._classes(self.triple[x][y]) for y in range(V)] for x in range(V)]
        self.apts_of = [[m for m in self.py_masks if m >> u & 1] for u in range(V)]

    @staticmethod
    def _classes(row) -> dict[int, int]:
        out: dict[int, int] = {}
        for y, c in enumerate(row):
            out[c] = out.get(c, 0) | (1 << y)
        return out

    def verify(self, perms: np.ndarray) -> np.ndarray:
        """Boolean per row: does the permutation map every apartment to one?"""
        imgs = perms[:, self.apts]  # (P, A, m)
        weights = np.left_shift(np.uint64(1), imgs.astype(np.uint64))
        masks = np.bitwise_or.reduce(weights, axis=2)
        return np.isin(masks, self.sorted_masks).all(axis=1)


def search_apartment_preservers(H: ApartmentHypergraph, batch: int = 4096,
                                first_apartment: bool = True) -> SearchResult:
    V = H.V
    stats = SearchStats()
    t0 = time.perf_counter()
    deg_cls = ApartmentHypergraph._classes(H.degree)
    dom0 = [deg_cls[H.degree[u]] for u in range(V)]
    static = list(H.apts[0]) if first_apartment and len(H.apts) else []
    pair, triple, pair_cls, triple_cls = H.pair, H.triple, H.pair_cls, H.triple_cls

    found: list[np.ndarray] = []
    pending: list[list[int]] = []

    def flush():
        if not pending:
            return
        arr = np.array(pending, dtype=np.int64)
        ok = H.verify(arr)
        stats.rejected_leaves += int((~ok).sum())
        found.append(arr[ok])
        pending.clear()

    def leaf(img: list[int]):
        stats.leaves += 1
        pending.append(list(img))
        if len(pending) >= batch:
            flush()

    img = [-1] * V

    def rec(dom: list[int], assigned: list[int], used: int):
        stats.nodes += 1
        un = [w for w in range(V) if img[w] < 0]
        if not un:
            leaf(img)
            return
        if all(dom[w] & (dom[w] - 1) == 0 for w in un):
            imgs = 0
            for w in un:
                imgs |= dom[w]
            if imgs.bit_count() != len(un) or imgs & used:
                return
            for w in un:
                img[w] = dom[w].bit_length() - 1
            leaf(img)
            for w in un:
                img[w] = -1
            return
        u = None
        for s in static:
            if img[s] < 0:
                u = int(s)
                break
        if u is None:
            u = min(un, key=lambda w: dom[w].bit_count())
        cand = dom[u] & ~used
        while cand:
            low = cand & -cand
            x = low.bit_length() - 1
            cand ^= low
            img[u] = x
            new_used = used | low
            ok = True
            # apartments that just became fully assigned must map to apartments
            assigned_mask = 0
            for a in assigned:
                assigned_mask |= 1 << a
            assigned_mask |= 1 << u
            for m in H.apts_of[u]:
                if m & assigned_mask == m:
                    im = 0
                    mm = m
                    while mm:
                        b = mm & -mm
                        im |= 1 << img[b.bit_length() - 1]
                        mm ^= b
                    if im not in H.mask_set:
                        ok = False
                        break
            if ok:
                nd = list(dom)
                pc = pair_cls[x]
                prow = pair[u]
                trow = triple[u]
                for w in un:
                    if w == u:
                        continue
                    d = nd[w] & pc.get(prow[w], 0) & ~new_used
                    if d:
                        for a in assigned:
                            d &= triple_cls[img[a]][x].get(trow[a][w], 0)
                            if not d:
                                break
                    if not d:
                        ok = False
                        break
                    nd[w] = d
            if ok:
                nd[u] = low
                rec(nd, assigned + [u], new_used)
            img[u] = -1

    rec(dom0, [], 0)
    flush()
    perms = np.concatenate(found) if found else np.zeros((0, V), dtype=np.int64)
    order = np.lexsort(perms.T[::-1]) if len(perms) else np.arange(0)
    perms = perms[order]
    stats.seconds = time.perf_counter() - t0
    return SearchResult(perms, stats)


def apartment_hypergraph(G: Grassmannian, max_frames: int = 200_000) -> ApartmentHypergraph:
    from .reconstruct import apartment_ordinals

    return ApartmentHypergraph(len(G), apartment_ordinals(G, max_frames))
