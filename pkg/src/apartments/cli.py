"""``apartments`` command line interface.

Exit codes: 0 success / PASS, 1 FAIL (a witness is printed), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys

from .apartment import (
    Apartment,
    Frame,
    is_inexact,
    labels_from_json,
    labels_to_json,
    maximal_inexact_subsets_bruteforce,
    recognize_apartment,
    structural_maximal_inexact,
)
from .errors import GuardError, NotSpecialError, ReconstructionError
from .field import MAX_ORDER, FieldError, FieldSpec, field_of_order, get_field, is_prime
from .grassmann import (
    GrassmannianBijection,
    enumerate_grassmannian,
    gaussian_binomial,
    grassmann_graph,
    maximal_cliques,
)
from .harness import DEFAULT_GRID, EXPERIMENTS, run_default_grid, run_experiment
from .reconstruct import induce, random_semilinear, reconstruct
from .special import ApartmentBijection, classify_by_matching, classify_by_procedure, is_special
from .subspace import Subspace


class UsageError(Exception):
    pass


def _field(args) -> FieldSpec:
    if args.p is not None:
        if not is_prime(args.p):
            raise UsageError(f"--p {args.p} is not prime")
        e = args.e or 1
        modulus = tuple(int(c) for c in args.modulus.split(",")) if args.modulus else None
        if args.q is not None and args.q != args.p**e:
            raise UsageError(f"-q {args.q} does not equal p^e = {args.p ** e}")
        try:
            return get_field(args.p, e, modulus)
        except (FieldError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    if args.modulus or args.e:
        raise UsageError("--e/--modulus need --p")
    q = args.q if args.q is not None else 2
    try:
        return field_of_order(q)
    except (FieldError, ValueError) as exc:
        raise UsageError(f"-q {q}: {exc} (supported: prime powers up to {MAX_ORDER})") from None


def _nk(args, need_k: bool = True) -> tuple[int, int]:
    n, k = args.n, args.k
    if n is None or n < 1:
        raise UsageError("-n must be a positive integer")
    if need_k and (k is None or not 0 <= k <= n):
        raise UsageError(f"-k must satisfy 0 <= k <= n (n={n})")
    return n, k


def _read_json(path: str | None):
    if not path:
        raise UsageError("--input is required for this subcommand")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _table(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()
    cells = [[str(k) for k in keys]] + [[json.dumps(r[k]) if isinstance(r[k], (list, dict)) else str(r[k])
                                         for k in keys] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(keys))]
    return "\n".join("  ".join(c[i].ljust(widths[i]) for i in range(len(keys))).rstrip() for c in cells)


def _render(args, obj, rows: list[dict] | None = None) -> str:
    if args.format == "json" or rows is None:
        return _dump(obj)
    return _table(rows, args.format)


# --- subcommands ----------------------------------------------------------


def cmd_enum(args) -> int:
    F = _field(args)
    n, k = _nk(args)
    if args.count_only:
        _emit(args, str(gaussian_binomial(n, k, F.q)))
        return 0
    G = enumerate_grassmannian(n, k, F, max_elements=args.guard_elements)
    rows = [{"ordinal": i, "rref": [list(r) for r in X.rows]} for i, X in enumerate(G.elements)]
    obj = {"n": n, "k": k, "field": F.to_json(), "count": len(G), "elements": rows}
    _emit(args, _render(args, obj, rows))
    return 0


def cmd_graph(args) -> int:
    F = _field(args)
    n, k = _nk(args)
    if not 1 <= k <= n - 1:
        raise UsageError("graph needs 1 <= k <= n - 1")
    G = enumerate_grassmannian(n, k, F, max_elements=args.guard_elements)
    gr = grassmann_graph(G)
    if args.dot:
        _emit(args, gr.to_dot())
        return 0
    obj = gr.to_json()
    obj.update(vertices=len(G), edge_count=len(obj["edges"]), degree=gr.degree(0), connected=gr.is_connected())
    rows = [{"vertices": len(G), "edges": len(obj["edges"]), "degree": gr.degree(0), "connected": gr.is_connected()}]
    _emit(args, _render(args, obj, rows))
    return 0


def cmd_cliques(args) -> int:
    F = _field(args)
    n, k = _nk(args)
    if not 1 <= k <= n - 1:
        raise UsageError("cliques needs 1 <= k <= n - 1")
    G = enumerate_grassmannian(n, k, F, max_elements=args.guard_elements)
    cl = maximal_cliques(grassmann_graph(G))
    rows = [{"kind": c.kind, "anchor": [list(r) for r in c.anchor.rows] if c.anchor is not None else None,
             "size": len(c.members), "members": sorted(c.members)} for c in cl]
    summary = {kind: sum(1 for c in cl if c.kind == kind) for kind in ("star", "top", "other")}
    obj = {"n": n, "k": k, "q": F.q, "summary": summary, "cliques": rows}
    _emit(args, _render(args, obj, rows))
    return 0


def cmd_apartment(args) -> int:
    F = _field(args)
    if args.action == "gen":
        n, k = _nk(args)
        if not 0 < k < n:
            raise UsageError("apartments need 0 < k < n")
        frame = Frame.random(F, n, random.Random(args.seed)) if args.seed is not None else Frame.standard(F, n)
        A = Apartment(frame, k)
        obj = A.to_json()
        obj["field"] = F.to_json()
        obj["elements"] = [{"label": list(J), "rref": [list(r) for r in A.elements[J].rows]} for J in A.labels]
        rows = obj["elements"]
        _emit(args, _render(args, obj, rows))
        return 0
    data = _read_json(args.input)
    if "field" in data:
        F = FieldSpec.from_json(data["field"])
    try:
        spaces = [Subspace.from_json(s, F) for s in data["subspaces"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"input needs a 'subspaces' list of {{n, dim, rref}} objects: {exc}") from None
    frame = recognize_apartment(spaces, exhaustive_fallback=True, max_frames=args.guard_frames)
    if frame is None:
        _emit(args, _dump({"apartment": False, "witness": "no frame spans exactly these subspaces"}))
        return 1
    _emit(args, _dump({"apartment": True, "frame": frame.to_json(), "k": spaces[0].dim}))
    return 0


def _apartment_from_input(args, F: FieldSpec):
    data = _read_json(args.input) if args.input else None
    if data is not None and "apartment" in data:
        d = data["apartment"]
        if "field" in data:
            F = FieldSpec.from_json(data["field"])
        return Apartment.from_json(d, F), data
    n, k = _nk(args)
    if not 0 < k < n:
        raise UsageError("apartments need 0 < k < n")
    return Apartment(Frame.standard(F, n), k), data


def cmd_inexact(args) -> int:
    F = _field(args)
    A, data = _apartment_from_input(args, F)
    if data is not None and "labels" in data:
        X = labels_from_json(data)
        try:
            inexact, wit = is_inexact(A, X, oracle=args.oracle)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        obj = {"inexact": inexact, "labels": labels_to_json(X)["labels"],
               "witness": wit.to_json() if wit is not None else None, "oracle": args.oracle}
        _emit(args, _dump(obj))
        return 0
    if args.oracle:
        family = maximal_inexact_subsets_bruteforce(A, args.guard_subsets)
        mode = "exhaustive-scan"
    else:
        family = sorted(set(structural_maximal_inexact(A).values()), key=sorted)
        mode = "structural"
    rows = [{"labels": sorted(list(J) for J in S)} for S in family]
    obj = {"n": A.n, "k": A.k, "q": A.field.q, "mode": mode, "count": len(family), "subsets": rows}
    _emit(args, _render(args, obj, rows))
    return 0


def cmd_classify(args) -> int:
    F = _field(args)
    data = _read_json(args.input)
    if "field" in data:
        F = FieldSpec.from_json(data["field"])
    try:
        g = ApartmentBijection.from_json(data, F)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad bijection JSON: {exc}") from None
    try:
        if not is_special(g):
            _emit(args, _dump({"special": False, "witness": "some maximal inexact subset maps to a non-maximal-inexact set"}))
            return 1
        cls = classify_by_procedure(g)
        if cls != classify_by_matching(g):  # pragma: no cover - differential guard
            _emit(args, _dump({"special": True, "error": "procedure and matching disagree"}))
            return 1
    except NotSpecialError as exc:
        _emit(args, _dump({"special": False, "witness": str(exc)}))
        return 1
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, _dump(cls.to_json()))
    return 0


def cmd_reconstruct(args) -> int:
    data = _read_json(args.input)
    try:
        f = GrassmannianBijection.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad bijection JSON: {exc}") from None
    try:
        res = reconstruct(f, check_apartments=args.check, rng=random.Random(args.seed or 0))
    except ReconstructionError as exc:
        _emit(args, _dump({"status": "FAIL", "stage": exc.stage, "error": str(exc), "witness": exc.witness}))
        return 1
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = res.to_json()
    out["status"] = "PASS"
    _emit(args, _dump(out))
    return 0


def cmd_random_map(args) -> int:
    F = _field(args)
    n, k = _nk(args)
    if not 1 <= k <= n - 1:
        raise UsageError("random-map needs 1 <= k <= n - 1")
    if args.duality and 2 * k != n:
        raise UsageError("--duality needs n = 2k")
    rng = random.Random(args.seed or 0)
    l = random_semilinear(F, n, rng)
    G = enumerate_grassmannian(n, k, F, max_elements=args.guard_elements)
    f = induce(l, G, duality=args.duality)
    out = f.to_json()
    out["source_map"] = l.to_json()
    out["duality"] = args.duality
    _emit(args, _dump(out))
    return 0


def cmd_verify(args) -> int:
    name = args.experiment
    if name == "default-grid":
        reports = run_default_grid(args.seed or 0)
    elif name in EXPERIMENTS:
        params = {}
        if name != "fano-census":
            for key in ("n", "k", "q", "seed", "count"):
                v = getattr(args, key)
                if v is not None:
                    params[key] = v
            if name == "hyperplane-procedure":
                params.pop("k", None)
            if name in ("clique-census", "apartment-preserver-search", "inexact-census"):
                params.pop("count", None)
            if name == "clique-census":
                params.pop("seed", None)
            if name in ("apartment-preserver-search", "inexact-census", "clique-census",
                        "roundtrip-suite", "classifier-differential"):
                missing = [x for x in ("n", "k", "q") if x not in params]
                if missing:
                    defaults = dict(next(p for e, p in DEFAULT_GRID if e == name))
                    for x in missing:
                        params[x] = defaults[x]
            if name == "hyperplane-procedure":
                params.setdefault("n", 3)
                params.setdefault("q", 2)
        reports = [run_experiment(name, **params)]
    else:
        sys.stderr.write(f"unknown experiment {name!r}; available: {', '.join(sorted(EXPERIMENTS) + ['default-grid'])}\n")
        return 2
    include_timing = not args.diff_mode
    if args.format == "json":
        if len(reports) == 1:
            text = reports[0].to_json(include_timing)
        else:
            d = {"reports": [r.payload() for r in reports]}
            if include_timing:
                d["metadata"] = {"wall_time_seconds": [round(r.wall_time, 3) for r in reports]}
            text = json.dumps(d, sort_keys=True, indent=2)
    else:
        text = "\n\n".join(r.render(args.format, include_timing) for r in reports)
    _emit(args, text)
    return 0 if all(r.passed for r in reports) else 1


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", type=int, help="ambient dimension")
    common.add_argument("-k", type=int, help="subspace dimension")
    common.add_argument("-q", type=int, help="field order (prime power <= 64)")
    common.add_argument("--p", type=int, help="field characteristic")
    common.add_argument("--e", type=int, help="extension degree")
    common.add_argument("--modulus", help="comma-separated little-endian modulus coefficients")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--guard-elements", type=int, default=20000, help="max Grassmannian size")
    common.add_argument("--guard-subsets", type=int, default=12, help="max apartment size for subset scans")
    common.add_argument("--guard-frames", type=int, default=100000, help="max frames for exhaustive search")
    common.add_argument("--format", choices=["json", "table", "csv"], default="json")
    common.add_argument("--input", help="input JSON file")
    common.add_argument("--output", help="write output to this file")
    common.add_argument("--oracle", action="store_true", help="use exhaustive inexactness search")

    p = argparse.ArgumentParser(prog="apartments", description="Apartments of finite Grassmannians.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("enum", parents=[common], help="enumerate G_k(F_q^n)")
    s.add_argument("--count-only", action="store_true")
    s.set_defaults(func=cmd_enum)

    s = sub.add_parser("graph", parents=[common], help="Grassmann graph summary or DOT export")
    s.add_argument("--dot", action="store_true")
    s.set_defaults(func=cmd_graph)

    s = sub.add_parser("cliques", parents=[common], help="maximal cliques of the Grassmann graph")
    s.set_defaults(func=cmd_cliques)

    s = sub.add_parser("apartment", parents=[common], help="generate or recognize apartments")
    s.add_argument("action", choices=["gen", "recognize"])
    s.set_defaults(func=cmd_apartment)

    s = sub.add_parser("inexact", parents=[common], help="maximal inexact subsets or a single inexactness test")
    s.set_defaults(func=cmd_inexact)

    s = sub.add_parser("classify", parents=[common], help="classify a special bijection of apartments")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("reconstruct", parents=[common], help="recover the semilinear map of a bijection")
    s.add_argument("--check", choices=["sampled", "exhaustive"], default="sampled",
                   help="apartment-preservation check mode")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("random-map", parents=[common], help="bijection of G_k induced by a random semilinear map")
    s.add_argument("--duality", action="store_true", help="compose with annihilator duality (n = 2k)")
    s.set_defaults(func=cmd_random_map)

    s = sub.add_parser("verify", parents=[common], help="run a named experiment")
    s.add_argument("experiment", help=f"one of: {', '.join(sorted(EXPERIMENTS))}, default-grid")
    s.add_argument("--count", type=int, help="instances for randomized experiments")
    s.add_argument("--diff-mode", action="store_true", help="omit wall-time metadata")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GuardError) as exc:
        sys.stderr.write(f"apartments {args.command}: error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
