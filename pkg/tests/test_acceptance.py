"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

from __future__ import annotations

import sys
import time

import pytest

from apartments.harness import run_experiment

ROUNDTRIP_POINTS = [(3, 1, q) for q in (2, 3, 4)] + [(4, 2, q) for q in (2, 3, 4)] + [(4, 3, q) for q in (2, 3, 4)]


def _line(number: int, ok: bool, text: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"


def criterion_1():
    rep = run_experiment("fano-census")
    c = rep.counts
    ok = (rep.passed and c["bijections"] == 5040 and c["survivors"] == 168 == c["gl_order_orbit_stabilizer"]
          and c["roundtrip"] == 168 and rep.wall_time < 5)
    return ok, (f"Fano census {c['survivors']}/{c['bijections']} survive, {c['roundtrip']} round trips, "
                f"|GL(3,2)|={c['gl_order_orbit_stabilizer']}, {rep.wall_time:.2f}s (< 5s)")


def criterion_2():
    parts, ok = [], True
    for q, limit in ((2, 60.0), (3, None)):
        rep = run_experiment("inexact-census", n=4, k=2, q=q)
        c = rep.counts
        good = (rep.passed and c["mode"] == "exhaustive-scan" and c["maximal_inexact"] == 12
                and c["matches_structural"] and (limit is None or rep.wall_time < limit))
        ok &= good
        parts.append(f"(4,2,{q}) {c['maximal_inexact']} sets match={c['matches_structural']} {rep.wall_time:.2f}s")
    return ok, "maximal inexact scan " + "; ".join(parts)


def criterion_3():
    rep = run_experiment("clique-census", n=4, k=2, q=2)
    c = rep.counts
    sizes = {int(s) for s in c["intersection_sizes"]}
    ok = rep.passed and (c["stars"], c["tops"], c["other"]) == (15, 15, 0) and sizes <= {0, 1, 3}
    return ok, f"G_2(F_2^4) cliques: {c['stars']} star, {c['tops']} top, {c['other']} other; intersections {sorted(sizes)}"


def criterion_4():
    total, ok, parts = 0, True, []
    for (n, k, q), count in (((4, 2, 2), 400), ((4, 2, 3), 300), ((5, 2, 2), 300)):
        rep = run_experiment("classifier-differential", n=n, k=k, q=q, seed=2024, count=count)
        c = rep.counts
        total += c["instances"]
        ok &= rep.passed and c["agreements"] == count and c["first_label_rule_exact"] == c["first"]
        ok &= (c["second"] > 0) if 2 * k == n else (c["second"] == 0)
        parts.append(f"({n},{k},{q}) {c['agreements']}/{count} agree, second kind {c['second']}")
    ok &= total >= 1000
    return ok, f"classifier differential on {total} instances: " + "; ".join(parts)


def criterion_5():
    ok, parts = True, []
    for n, k, q in ROUNDTRIP_POINTS:
        rep = run_experiment("roundtrip-suite", n=n, k=k, q=q, seed=7, count=100, glue_pairs=500)
        c = rep.counts
        good = (rep.passed and c["projective_equal"] == c["sigma_exact"] == 100
                and c["glue_pass"] and c["glue_pairs_checked"] == 500)
        if q == 4:
            good &= c["sigma_nontrivial_inputs"] > 0
        ok &= good
        parts.append(f"({n},{k},{q}) {c['projective_equal']}/100")
    return ok, "reconstruction round trips with 500 glue pairs " + ", ".join(parts)


def criterion_6():
    ok, parts = True, []
    for n, k, q, factor in ((4, 2, 2, 2), (3, 1, 3, 1), (3, 1, 4, 1)):
        rep = run_experiment("apartment-preserver-search", n=n, k=k, q=q, seed=1)
        c = rep.counts
        good = (rep.passed and c["factor"] == factor and c["census"] == factor * c["induced_group_order"]
                and rep.wall_time < 600)
        ok &= good
        parts.append(f"({n},{k},{q}) census {c['census']} = {factor} x {c['induced_group_order']} in {rep.wall_time:.1f}s")
    return ok, "apartment-preserver search " + "; ".join(parts)


def criterion_7():
    ok, parts = True, []
    for n in (3, 4):
        rep = run_experiment("hyperplane-procedure", n=n, q=2, seed=11, count=30)
        c = rep.counts
        ok &= rep.passed and c["agreements"] == c["independent"] == c["inputs"]
        parts.append(f"({n},{n - 1},2) agree {c['agreements']}/{c['inputs']}, independent {c['independent']}/{c['inputs']}")
    return ok, "hyperplane procedure vs dual route " + "; ".join(parts)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("number", range(1, 8))
def test_criterion(number, capsys):
    ok, text = CRITERIA[number - 1]()
    line = _line(number, ok, text)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for i, fn in enumerate(CRITERIA, 1):
        t = time.perf_counter()
        ok, text = fn()
        print(_line(i, ok, text) + f" [{time.perf_counter() - t:.1f}s]", flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
