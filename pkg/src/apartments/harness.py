"""Named desk-scale experiments with reproducible reports."""

from __future__ import annotations

import csv
import io
import json
import random
import time
from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import comb, factorial
from typing import Callable

import numpy as np

from .apartment import (
    Apartment,
    Frame,
    complementary_subset,
    enumerate_frames,
    exhaustive_witness,
    maximal_inexact_subsets_bruteforce,
    ordered_pairs,
    structural_maximal_inexact,
    structural_witness,
)
from .errors import GuardError, ReconstructionError
from .field import FieldSpec, field_of_order
from .grassmann import (
    GrassmannianBijection,
    enumerate_grassmannian,
    gaussian_binomial,
    grassmann_graph,
    maximal_cliques,
)
from .linalg import SemilinearMap, identity
from .reconstruct import (
    corrupt,
    dual_ftpg_reconstruct,
    ftpg_reconstruct,
    hyperplane_independence,
    hyperplane_reconstruct,
    induce,
    local_glue_check,
    random_semilinear,
    reconstruct,
)
from .search import ApartmentHypergraph, apartment_hypergraph, search_apartment_preservers
from .special import classify_by_matching, classify_by_procedure, is_special, random_special_bijection


@dataclass
class ExperimentReport:
    experiment: str
    parameters: dict
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    passed: bool = False
    wall_time: float = 0.0

    def payload(self) -> dict:
        """Everything except timing: identical across runs with the same seed."""
        return {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "counts": self.counts,
            "witnesses": self.witnesses,
            "status": "PASS" if self.passed else "FAIL",
        }

    def to_json(self, include_timing: bool = True) -> str:
        d = {"report": self.payload()}
        if include_timing:
            d["metadata"] = {"wall_time_seconds": round(self.wall_time, 3)}
        return json.dumps(d, sort_keys=True, indent=2)

    def to_table(self, include_timing: bool = True) -> str:
        rows = [("experiment", self.experiment), ("status", "PASS" if self.passed else "FAIL")]
        rows += [(f"param.{k}", _fmt(v)) for k, v in sorted(self.parameters.items())]
        rows += [(f"count.{k}", _fmt(v)) for k, v in sorted(self.counts.items())]
        for i, w in enumerate(self.witnesses):
            rows.append((f"witness.{i}", json.dumps(w, sort_keys=True)))
        if include_timing:
            rows.append(("wall_time_s", f"{self.wall_time:.3f}"))
        width = max(len(a) for a, _ in rows)
        return "\n".join(f"{a.ljust(width)}  {b}" for a, b in rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "key", "value"])
        w.writerow(["report", "experiment", self.experiment])
        w.writerow(["report", "status", "PASS" if self.passed else "FAIL"])
        for k, v in sorted(self.parameters.items()):
            w.writerow(["parameter", k, _fmt(v)])
        for k, v in sorted(self.counts.items()):
            w.writerow(["count", k, _fmt(v)])
        for i, wit in enumerate(self.witnesses):
            w.writerow(["witness", i, json.dumps(wit, sort_keys=True)])
        return buf.getvalue()

    def render(self, fmt: str = "json", include_timing: bool = True) -> str:
        if fmt == "json":
            return self.to_json(include_timing)
        if fmt == "table":
            return self.to_table(include_timing)
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _fmt(v) -> str:
    return json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else str(v)


def _timed(fn: Callable[..., ExperimentReport]) -> Callable[..., ExperimentReport]:
    def wrapper(*args, **kwargs) -> ExperimentReport:
        t = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.wall_time = time.perf_counter() - t
        return rep

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --- independent group-order oracles --------------------------------------


def gl_order(n: int, q: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


def gl_order_by_frames(F: FieldSpec, n: int, max_frames: int = 200_000) -> tuple[int, int]:
    """(#frames, |GL(n,q)|) with the frame count obtained by enumeration and
    the frame stabilizer being the n! (q-1)^n monomial matrices."""
    frames = sum(1 for _ in enumerate_frames(F, n, max_frames))
    return frames, frames * factorial(n) * (F.q - 1) ** n


def induced_group_order(F: FieldSpec, n: int, max_frames: int = 200_000) -> int:
    """Order of the group induced on G_k by semilinear automorphisms
    (scalars act trivially, and nothing else does for 1 <= k <= n - 1)."""
    _, gl = gl_order_by_frames(F, n, max_frames)
    return gl * F.e // (F.q - 1)


# --- experiments ----------------------------------------------------------


@_timed
def run_fano_census() -> ExperimentReport:
    F = field_of_order(2)
    G = enumerate_grassmannian(3, 1, F)
    H = apartment_hypergraph(G)
    perms = np.array(list(permutations(range(len(G)))), dtype=np.int64)
    inv = np.argsort(perms, axis=1)
    ok = H.verify(perms) & H.verify(inv)
    survivors = perms[ok]
    rep = ExperimentReport("fano-census", {"n": 3, "k": 1, "q": 2})
    witnesses = []
    roundtrip = sigma_id = 0
    for row in survivors:
        f = GrassmannianBijection(G, row.tolist())
        try:
            l = ftpg_reconstruct(f)
        except ReconstructionError as exc:
            witnesses.append({"perm": row.tolist(), "error": str(exc)})
            continue
        if GrassmannianBijection.from_semilinear(l, G) == f:
            roundtrip += 1
        if l.aut.is_identity():
            sigma_id += 1
    _, gl = gl_order_by_frames(F, 3)
    rep.counts = {
        "bijections": len(perms),
        "survivors": len(survivors),
        "non_survivors": len(perms) - len(survivors),
        "roundtrip": roundtrip,
        "sigma_identity": sigma_id,
        "gl_order_orbit_stabilizer": gl,
    }
    rep.witnesses = witnesses[:5]
    rep.passed = len(survivors) == 168 == gl and roundtrip == sigma_id == 168
    return rep


def _duality_split(G, perms: np.ndarray) -> int:
    """How many rows send the first star onto a top."""
    stars = G.star_index()
    tops = set(G.top_index().values())
    s = sorted(next(iter(stars.values())))
    return sum(1 for row in perms if frozenset(row[s].tolist()) in tops)


@_timed
def run_apartment_preserver_search(n: int, k: int, q: int, with_duality_expectation: bool | None = None,
                                   seed: int = 0, reconstruct_samples: int = 20,
                                   max_elements: int = 64) -> ExperimentReport:
    F = field_of_order(q)
    if gaussian_binomial(n, k, q) > max_elements:
        raise GuardError(f"search guard: G_{k}(F_{q}^{n}) has {gaussian_binomial(n, k, q)} elements > {max_elements}")
    expect_dual = (2 * k == n) if with_duality_expectation is None else with_duality_expectation
    G = enumerate_grassmannian(n, k, F)
    H = apartment_hypergraph(G)
    res = search_apartment_preservers(H)
    order = induced_group_order(F, n)
    factor = 2 if expect_dual else 1
    rep = ExperimentReport("apartment-preserver-search",
                           {"n": n, "k": k, "q": q, "seed": seed, "with_duality_expectation": expect_dual})
    counts = {
        "census": res.count,
        "induced_group_order": order,
        "gl_order_product_formula": gl_order(n, q),
        "expected": order * factor,
        "factor": factor,
        "nodes": res.stats.nodes,
        "rejected_leaves": res.stats.rejected_leaves,
    }
    ok = res.count == order * factor and gl_order_by_frames(F, n)[1] == gl_order(n, q)
    if 1 < k < n - 1:
        dual = _duality_split(G, res.perms)
        counts["duality_members"] = dual
        ok &= dual == (order if expect_dual else 0)
    # members induced by nontrivial field automorphisms must be present when e > 1
    if F.e > 1:
        frob = tuple(GrassmannianBijection.from_semilinear(SemilinearMap(identity(n), F.frobenius(1)), G).perm)
        counts["frobenius_member_present"] = bool((res.perms == np.array(frob)).all(axis=1).any())
        ok &= counts["frobenius_member_present"]
    rng = random.Random(seed)
    witnesses = []
    sample = rng.sample(range(res.count), min(reconstruct_samples, res.count))
    recon = sig = 0
    for idx in sample:
        f = GrassmannianBijection(G, res.perms[idx].tolist())
        try:
            r = reconstruct(f, check_apartments=None, rng=rng)
            recon += 1
            sig += not r.map.aut.is_identity()
        except (ReconstructionError, ValueError) as exc:
            witnesses.append({"perm": res.perms[idx].tolist(), "error": str(exc)})
    counts["reconstructed_sample"] = recon
    counts["sample_size"] = len(sample)
    counts["sample_sigma_nontrivial"] = sig
    ok &= recon == len(sample)
    rep.counts, rep.witnesses, rep.passed = counts, witnesses[:5], bool(ok)
    return rep


@_timed
def run_inexact_census(n: int, k: int, q: int, seed: int = 0, max_scan_elements: int = 12,
                       random_subsets: int = 200) -> ExperimentReport:
    F = field_of_order(q)
    A = Apartment(Frame.standard(F, n), k)
    rep = ExperimentReport("inexact-census", {"n": n, "k": k, "q": q, "seed": seed})
    structural = set(structural_maximal_inexact(A).values())
    degenerate = not 1 < k < n - 1
    counts: dict = {"structural": len(structural), "degenerate": degenerate}
    if comb(n, k) <= max_scan_elements:
        found = maximal_inexact_subsets_bruteforce(A, max_scan_elements)
        counts["mode"] = "exhaustive-scan"
        counts["maximal_inexact"] = len(found)
        match = set(found) == structural
        counts["matches_structural"] = match
        if not match:
            rep.witnesses = [{"labels": sorted(map(list, s))} for s in set(found) ^ structural][:5]
        rep.passed = match
    else:
        # too many subsets to scan: certify every structural set is inexact
        # and maximal with the complete oracle, then sample random subsets
        counts["mode"] = "structural-census"
        ok = True
        for S in sorted(structural, key=sorted):
            if exhaustive_witness(A, S) is None:
                ok = False
                rep.witnesses.append({"not_inexact": sorted(map(list, S))})
                continue
            for J in A.labels:
                if J not in S and exhaustive_witness(A, S | {J}) is not None:
                    ok = False
                    rep.witnesses.append({"not_maximal": sorted(map(list, S)), "extra": list(J)})
        rng = random.Random(seed)
        agree = 0
        for _ in range(random_subsets):
            size = rng.randrange(1, len(A.labels) + 1)
            X = frozenset(rng.sample(A.labels, size))
            oracle = exhaustive_witness(A, X) is not None
            pred = any(X <= S for S in structural)
            if oracle == pred:
                agree += 1
            else:
                ok = False
                rep.witnesses.append({"subset": sorted(map(list, X)), "oracle": oracle})
        counts["random_subsets"] = random_subsets
        counts["random_agreements"] = agree
        rep.passed = ok
    expected = n if degenerate else n * (n - 1)
    rep.passed = rep.passed and len(structural) == expected
    rep.counts = counts
    return rep


@_timed
def run_clique_census(n: int, k: int, q: int) -> ExperimentReport:
    F = field_of_order(q)
    G = enumerate_grassmannian(n, k, F)
    cl = maximal_cliques(grassmann_graph(G))
    kinds = {"star": 0, "top": 0, "other": 0}
    for c in cl:
        kinds[c.kind] += 1
    sizes: dict[int, int] = {}
    for a, b in combinations(cl, 2):
        s = (a.members & b.members).__len__()
        sizes[s] = sizes.get(s, 0) + 1
    exp_star = gaussian_binomial(n, k - 1, q)
    exp_top = gaussian_binomial(n, k + 1, q)
    rep = ExperimentReport("clique-census", {"n": n, "k": k, "q": q})
    rep.counts = {
        "maximal_cliques": len(cl),
        "stars": kinds["star"],
        "tops": kinds["top"],
        "other": kinds["other"],
        "expected_stars": exp_star,
        "expected_tops": exp_top,
        "intersection_sizes": {str(s): c for s, c in sorted(sizes.items())},
    }
    if 1 < k < n - 1:
        rep.passed = (kinds == {"star": exp_star, "top": exp_top, "other": 0}
                      and set(sizes) <= {0, 1, q + 1})
    else:
        # a single clique type covers everything; the graph is complete
        rep.passed = len(cl) == 1
    return rep


@_timed
def run_roundtrip_suite(n: int, k: int, q: int, seed: int = 0, count: int = 100,
                        glue_pairs: int = 500, apartment_samples: int = 20) -> ExperimentReport:
    F = field_of_order(q)
    G = enumerate_grassmannian(n, k, F)
    rng = random.Random(seed)
    rep = ExperimentReport("roundtrip-suite", {"n": n, "k": k, "q": q, "seed": seed, "count": count,
                                               "glue_pairs": glue_pairs})
    passes = sigma_exact = nontrivial = 0
    witnesses = []
    last = None
    for t in range(count):
        l = random_semilinear(F, n, rng, nontrivial_aut=(F.e > 1 and t % 2 == 0))
        nontrivial += not l.aut.is_identity()
        f = induce(l, G)
        try:
            r = reconstruct(f, apartment_samples=apartment_samples, rng=rng)
        except (ReconstructionError, ValueError) as exc:
            witnesses.append({"map": l.to_json(), "error": str(exc)})
            continue
        if r.map.projectively_equal(l) and not r.duality:
            passes += 1
        else:
            witnesses.append({"map": l.to_json(), "got": r.map.to_json()})
        sigma_exact += r.map.aut == l.aut
        last = (f, r)
    glue_ok = corrupt_caught = False
    glue_details: dict = {}
    if last is not None:
        f, r = last
        v = local_glue_check(f, r.map, glue_pairs, rng, duality=r.duality)
        glue_ok, glue_details = v.ok, v.details
        if not v.ok:
            witnesses.append({"glue": v.witness})
        bad = local_glue_check(f, corrupt(r.map, rng), glue_pairs, rng, duality=r.duality)
        corrupt_caught = not bad.ok
    rep.counts = {
        "maps": count,
        "projective_equal": passes,
        "sigma_exact": sigma_exact,
        "sigma_nontrivial_inputs": nontrivial,
        "glue_pass": glue_ok,
        "glue_pairs_checked": glue_details.get("pairs", 0),
        "corruption_detected": corrupt_caught,
    }
    rep.witnesses = witnesses[:5]
    rep.passed = passes == sigma_exact == count and glue_ok and corrupt_caught
    return rep


@_timed
def run_classifier_differential(n: int, k: int, q: int, seed: int = 0, count: int = 100) -> ExperimentReport:
    F = field_of_order(q)
    rng = random.Random(seed)
    rep = ExperimentReport("classifier-differential", {"n": n, "k": k, "q": q, "seed": seed, "count": count})
    agree = first_exact = first = second = 0
    witnesses = []
    for _ in range(count):
        A = Apartment(Frame.random(F, n, rng), k)
        B = Apartment(Frame.random(F, n, rng), k)
        g, cls = random_special_bijection(A, B, rng)
        if not is_special(g):
            witnesses.append({"bijection": g.to_json(), "error": "generated bijection is not special"})
            continue
        p, m = classify_by_procedure(g), classify_by_matching(g)
        if p == m == cls:
            agree += 1
        else:
            witnesses.append({"bijection": g.to_json(), "procedure": p.to_json(), "matching": m.to_json()})
        if m.kind == "first":
            first += 1
            first_exact += all(g.mapping[J] == tuple(sorted(m.delta[j] for j in J)) for J in A.labels)
        else:
            second += 1
    rep.counts = {"instances": count, "agreements": agree, "first": first, "second": second,
                  "first_label_rule_exact": first_exact}
    rep.witnesses = witnesses[:5]
    second_ok = second > 0 if 2 * k == n else second == 0
    rep.passed = agree == count and first_exact == first and second_ok
    return rep


@_timed
def run_hyperplane_procedure(n: int, q: int, seed: int = 0, count: int = 20) -> ExperimentReport:
    F = field_of_order(q)
    G = enumerate_grassmannian(n, n - 1, F)
    rng = random.Random(seed)
    rep = ExperimentReport("hyperplane-procedure", {"n": n, "k": n - 1, "q": q, "seed": seed, "count": count})
    agree = independent = 0
    witnesses = []
    for _ in range(count):
        l = random_semilinear(F, n, rng)
        f = induce(l, G)
        a = hyperplane_reconstruct(f, rng)
        b = dual_ftpg_reconstruct(f)
        if a.projectively_equal(b) and a.projectively_equal(l):
            agree += 1
        else:
            witnesses.append({"map": l.to_json(), "hyperplane": a.to_json(), "dual": b.to_json()})
        v = hyperplane_independence(f, rng)
        if v:
            independent += 1
        else:
            witnesses.append(v.witness)
    rep.counts = {"inputs": count, "agreements": agree, "independent": independent}
    rep.witnesses = witnesses[:5]
    rep.passed = agree == independent == count
    return rep


EXPERIMENTS: dict[str, Callable[..., ExperimentReport]] = {
    "fano-census": run_fano_census,
    "apartment-preserver-search": run_apartment_preserver_search,
    "inexact-census": run_inexact_census,
    "clique-census": run_clique_census,
    "roundtrip-suite": run_roundtrip_suite,
    "classifier-differential": run_classifier_differential,
    "hyperplane-procedure": run_hyperplane_procedure,
}

DEFAULT_GRID = [
    ("fano-census", {}),
    ("apartment-preserver-search", {"n": 3, "k": 1, "q": 2}),
    ("apartment-preserver-search", {"n": 3, "k": 1, "q": 3}),
    ("apartment-preserver-search", {"n": 3, "k": 1, "q": 4}),
    ("apartment-preserver-search", {"n": 4, "k": 2, "q": 2}),
    ("inexact-census", {"n": 4, "k": 2, "q": 2}),
    ("inexact-census", {"n": 4, "k": 2, "q": 3}),
    ("inexact-census", {"n": 5, "k": 2, "q": 2}),
    ("inexact-census", {"n": 6, "k": 3, "q": 2}),
    ("clique-census", {"n": 4, "k": 2, "q": 2}),
    ("clique-census", {"n": 4, "k": 2, "q": 3}),
    ("clique-census", {"n": 5, "k": 2, "q": 2}),
    ("roundtrip-suite", {"n": 3, "k": 1, "q": 2}),
    ("roundtrip-suite", {"n": 3, "k": 1, "q": 3}),
    ("roundtrip-suite", {"n": 3, "k": 1, "q": 4}),
    ("roundtrip-suite", {"n": 4, "k": 2, "q": 2}),
    ("roundtrip-suite", {"n": 4, "k": 2, "q": 3}),
    ("roundtrip-suite", {"n": 5, "k": 2, "q": 2}),
    ("classifier-differential", {"n": 4, "k": 2, "q": 2}),
    ("classifier-differential", {"n": 4, "k": 2, "q": 3}),
    ("classifier-differential", {"n": 5, "k": 2, "q": 2}),
    ("classifier-differential", {"n": 6, "k": 3, "q": 2}),
]


def run_experiment(name: str, **params) -> ExperimentReport:
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; available: {', '.join(sorted(EXPERIMENTS))}")
    return EXPERIMENTS[name](**params)


def run_default_grid(seed: int = 0) -> list[ExperimentReport]:
    out = []
    for name, params in DEFAULT_GRID:
        p = dict(params)
        if name not in ("fano-census", "clique-census"):
            p.setdefault("seed", seed)
        out.append(run_experiment(name, **p))
    return sorted(out, key=lambda r: (r.experiment, json.dumps(r.parameters, sort_keys=True)))


__all__ = ["ExperimentReport", "EXPERIMENTS", "DEFAULT_GRID", "run_experiment", "run_default_grid",
           "gl_order", "gl_order_by_frames", "induced_group_order"]
