"""Command line front-end: ``qinv <subcommand> ...`` with JSON or CSV output.

Exit codes: 0 success, 1 usage error, 2 a verification reported a failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import chain, cocycle, diagram, invariant
from .field import FieldError
from .quandle import QuandleError, parse_quandle


class UsageError(Exception):
    def __init__(self, error, hint=""):
        super().__init__(error)
        self.error = error
        self.hint = hint


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage().strip())


# ---------------------------------------------------------------------------
# spec parsing

def _quandle(args):
    if not args.quandle:
        raise UsageError("--quandle is required", "e.g. alexander:3^2/1,0,1:omega=-1")
    try:
        return parse_quandle(args.quandle)
    except (QuandleError, FieldError, ValueError) as e:
        raise UsageError(f"bad quandle spec: {e}", "alexander:<p^h[/modulus]>:omega=<elem|-1|gen|ordN>")


def _alexander(args):
    X = _quandle(args)
    if X.kind != "alexander":
        raise UsageError("this subcommand needs an Alexander quandle")
    return X


def _link(args):
    if not args.link:
        raise UsageError("--link is required", "braid:n=2:1,1,1 | pd:[[...]] | pd:@file.json | knot:3_1 | torus:m,n")
    try:
        return diagram.parse_link(args.link)
    except (diagram.DiagramError, ValueError, OSError) as e:
        raise UsageError(f"bad link spec: {e}")


def parse_quad(X, s: str) -> cocycle.MochizukiQuadruple:
    try:
        qs = tuple(int(v) for v in s.split(","))
    except ValueError:
        raise UsageError(f"bad quadruple {s!r}", "four powers of p, e.g. 1,1,3,3")
    if len(qs) != 4:
        raise UsageError(f"bad quadruple {s!r}", "four powers of p, e.g. 1,1,3,3")
    cases = cocycle.quadruple_cases(X.field, X.omega, qs)
    if not cases:
        raise UsageError(f"{qs} is not a Mochizuki quadruple for {X.spec_string()}",
                         "list valid ones with: qinv cocycles list --quandle ...")
    return cocycle.MochizukiQuadruple(*qs, cases[0])


def parse_cocycle(X, s: str):
    """gamma:q1,q2,q3,q4 | mono:a,b,c | e0:ap,b | e1:a,bp | poly:<json> | poly:@file."""
    F = X.field
    kind, _, body = s.partition(":")
    try:
        if kind == "gamma":
            quad = parse_quad(X, body)
            return cocycle.gamma_cocycle(F, X.omega, quad), {"gamma": quad.to_json()}
        if kind == "mono":
            ex = [int(v) for v in body.split(",")]
            return cocycle.PolyCochain.monomial(F, ex), {"mono": ex}
        if kind == "e0":
            ap, b = (int(v) for v in body.split(","))
            return cocycle.e0_cocycle(F, X.omega, ap, b), {"e0": [ap, b]}
        if kind == "e1":
            a, bp = (int(v) for v in body.split(","))
            return cocycle.e1_cocycle(F, X.omega, a, bp), {"e1": [a, bp]}
        if kind == "poly":
            if body.startswith("@"):
                with open(body[1:]) as fh:
                    data = json.load(fh)
            else:
                data = json.loads(body)
            return cocycle.PolyCochain.from_json(F, data), {"poly": data}
    except cocycle.CocycleError as e:
        raise UsageError(f"bad cocycle: {e}")
    except (ValueError, OSError) as e:
        raise UsageError(f"bad cocycle spec {s!r}: {e}")
    raise UsageError(f"unknown cocycle kind {kind!r}", "gamma:1,1,3,3 | mono:1,3,9 | e0:3,9 | e1:1,3 | poly:{...}")


# ---------------------------------------------------------------------------
# output

def _to_jsonable(obj):
    if isinstance(obj, invariant.GroupRingValue):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, obj))


def emit_report(result, fmt: str = "json") -> bytes:
    """Deterministic serialization.  CSV lists (element, multiplicity) rows
    for a group-ring value and (key, value) rows otherwise."""
    data = _to_jsonable(result)
    if fmt == "json":
        return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode()
    if fmt != "csv":
        raise UsageError(f"unknown format {fmt!r}", "json | csv")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if isinstance(data, dict) and "coeffs" in data and "ring" in data:
        w.writerow(["element", "multiplicity"])
        for c in data["coeffs"]:
            w.writerow([c["elem"], c["mult"]])
    else:
        rows = []
        _flatten("", data, rows)
        w.writerow(["key", "value"])
        w.writerows(rows)
    return buf.getvalue().encode()


# ---------------------------------------------------------------------------
# subcommands

def cmd_colorings(args):
    X = _quandle(args)
    D = _link(args)
    cols = diagram.enumerate_colorings(D, X)
    out = {"quandle": X.spec_string(), "link": D.source, "arcs": D.n_arcs,
           "crossings": D.n_crossings, "regions": D.n_regions, "count": int(len(cols))}
    if X.kind == "alexander":
        out["dim"] = len(diagram.coloring_basis(D, X))
    if args.list:
        out["colorings"] = [[X.elem_label(int(v)) for v in row] for row in cols]
    return out, True


def cmd_invariant(args):
    X = _quandle(args)
    D = _link(args)
    psi, info = parse_cocycle(X, args.cocycle)
    try:
        val = invariant.state_sum_invariant(D, X, psi, mode=args.mode, meta={"cocycle": info})
    except invariant.NotACocycle as e:
        raise UsageError(str(e), "check it with: qinv cocycles check")
    return val, True


def cmd_dw(args):
    X = _alexander(args)
    D = _link(args)
    quad = parse_quad(X, args.quad)
    kappa = cocycle.theta_gamma(quad, X)
    try:
        val = invariant.dw_partial(D, X, kappa, samples=args.samples, seed=args.seed)
    except invariant.HypothesisUnverified as e:
        return {"error": str(e), "ok": False}, False
    return val, True


def cmd_cocycles(args):
    X = _alexander(args)
    F = X.field
    if args.action == "list":
        if args.degree == 3 and args.quads_only:
            quads = cocycle.quadruple_enumerate(F, X.omega)
            return {"quandle": X.spec_string(), "quadruples": [q.to_json() for q in quads]}, True
        cat = cocycle.quandle_cocycle_catalogue(F, X.omega, args.degree)
        entries = []
        for e in cat:
            d = {"kind": e["kind"], "params": e["params"], "poly": e["poly"].to_string()}
            if "case" in e:
                d["case"] = e["case"]
            entries.append(d)
        return {"quandle": X.spec_string(), "degree": args.degree, "cocycles": entries}, True
    if not args.cocycle:
        raise UsageError("--cocycle is required for cocycles check")
    psi, info = parse_cocycle(X, args.cocycle)
    try:
        rep = cocycle.quandle_cocycle_check(X, psi, psi.arity, report=True)
    except cocycle.TooLarge as e:
        raise UsageError(str(e))
    rep.update({"quandle": X.spec_string(), "cocycle": info})
    return rep, rep["ok"]


def cmd_verify(args):
    X = _quandle(args)
    what = args.what
    if what == "chain-map":
        ns = [args.n] if args.n else [2, 3, 4]
        reps = [chain.check_chain_map(X, n) for n in ns]
        ok = all(r["ok"] for r in reps)
        return {"quandle": X.spec_string(), "results": reps, "ok": ok}, ok
    if X.kind != "alexander":
        raise UsageError(f"verify {what} needs an Alexander quandle")
    if what == "identities":
        rep = cocycle.verify_scaling_identities(X.field, X.omega)
        return rep, rep["ok"]
    if what == "theta":
        quad = parse_quad(X, args.quad)
        rep = cocycle.theta_checks(cocycle.theta_gamma(quad, X), samples=args.samples, seed=args.seed)
        return rep, rep["ok"]
    if what == "massey":
        quad = parse_quad(X, args.quad)
        try:
            rep = cocycle.massey_verify(quad, X, samples=args.samples if args.samples else 0, seed=args.seed)
        except cocycle.CaseTwoUnsupported as e:
            raise UsageError(str(e))
        return rep, rep["ok"] is not False
    if what == "lemma55":
        quad = parse_quad(X, args.quad)
        try:
            rep = invariant.lemma55_pairings(args.m, args.n, X, quad)
        except invariant.HypothesisUnmet as e:
            raise UsageError(str(e))
        return rep, rep["ok"]
    raise UsageError(f"unknown verification {what!r}")


def cmd_homology(args):
    X = _quandle(args)
    ns = [args.n] if args.n else list(range(1, 4))
    out = []
    for n in ns:
        try:
            H = chain.quandle_homology(X, n, limit=args.limit)
        except chain.TooLarge as e:
            raise UsageError(str(e), "raise --limit")
        H["group"] = chain.format_homology(H)
        out.append(H)
    return {"quandle": X.spec_string(), "homology": out}, True


def cmd_torus(args):
    X = _alexander(args)
    quad = parse_quad(X, args.quad)
    try:
        cf = invariant.torus_closed_form(args.m, args.n, X, quad)
    except invariant.HypothesisUnmet as e:
        raise UsageError(str(e))
    out = {"m": args.m, "n": args.n, "quandle": X.spec_string(), "quad": quad.to_json(),
           "case": cf.meta["case"], "closed_form": cf}
    ok = True
    if args.crosscheck:
        bf = invariant.torus_brute_force(args.m, args.n, X, quad, mode=args.mode)
        out["brute_force"] = bf
        out["match"] = bf == cf
        ok = out["match"]
    return out, ok


def cmd_table(args):
    X = _alexander(args)
    quad = parse_quad(X, args.quad)
    if args.knot not in invariant.TABULATED:
        raise UsageError(f"{args.knot} is not a tabulated knot", ", ".join(invariant.TABULATED))
    D = diagram.parse_link("knot:" + args.knot)
    try:
        T = invariant.table_value(args.knot, X.field, quad)
    except invariant.HypothesisUnmet as e:
        raise UsageError(str(e))
    I = invariant.state_sum_invariant(D, X, cocycle.gamma_cocycle(X.field, X.omega, quad), mode="reduced",
                                      check=False)
    match = I == T
    mirror = I.negate_elements() == T
    return {"knot": args.knot, "computed": I, "table": T, "match": match,
            "match_after_mirror": mirror}, match or mirror


def build_parser():
    p = _Parser(prog="qinv", description="Quandle cocycle invariants over finite fields")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quandle")
    common.add_argument("--format", default="json", choices=["json", "csv"])
    common.add_argument("--output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("colorings", parents=[common])
    s.add_argument("--link")
    s.add_argument("--list", action="store_true")
    s.set_defaults(func=cmd_colorings)

    s = sub.add_parser("invariant", parents=[common])
    s.add_argument("--link")
    s.add_argument("--cocycle", required=True)
    s.add_argument("--mode", default="full", choices=["full", "reduced"])
    s.set_defaults(func=cmd_invariant)

    s = sub.add_parser("dw", parents=[common])
    s.add_argument("--link")
    s.add_argument("--quad", required=True)
    s.add_argument("--samples", type=int, default=2000)
    s.set_defaults(func=cmd_dw)

    s = sub.add_parser("cocycles", parents=[common])
    s.add_argument("action", choices=["list", "check"])
    s.add_argument("--degree", type=int, default=3, choices=[2, 3])
    s.add_argument("--cocycle")
    s.add_argument("--quads-only", action="store_true")
    s.set_defaults(func=cmd_cocycles)

    s = sub.add_parser("verify", parents=[common])
    s.add_argument("what", choices=["chain-map", "identities", "theta", "massey", "lemma55"])
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--quad")
    s.add_argument("--samples", type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("homology", parents=[common])
    s.add_argument("--n", type=int)
    s.add_argument("--limit", type=int, default=3 ** 6)
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("torus", parents=[common])
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--quad", required=True)
    s.add_argument("--crosscheck", action="store_true")
    s.add_argument("--mode", default="reduced", choices=["full", "reduced"])
    s.set_defaults(func=cmd_torus)

    s = sub.add_parser("table", parents=[common])
    s.add_argument("--knot", required=True)
    s.add_argument("--quad", required=True)
    s.set_defaults(func=cmd_table)
    return p


def run(argv=None, stdout=None):
    """Run one subcommand; returns the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    fmt = "json"
    try:
        args = parser.parse_args(argv)
        if not args.cmd:
            raise UsageError("missing subcommand", parser.format_usage().strip())
        fmt = args.format
        result, ok = args.func(args)
        data = emit_report(result, fmt)
        if args.output:
            with open(args.output, "wb") as fh:
                fh.write(data)
        else:
            stdout.write(data.decode())
        return 0 if ok else 2
    except UsageError as e:
        stdout.write(emit_report({"error": e.error, "hint": e.hint}, "json").decode())
        return 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
