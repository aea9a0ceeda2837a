"""Command-line front end.

Exit codes: 0 completed (any verdict), 2 budget exceeded, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .catalog import CatalogError, load_class_data, load_generators, load_lattice, resolve
from .combinatorics import Partition
from .config import Config
from .design import FlagSet, is_design, pair_sums
from .exactlinalg import LinAlgError, RatMatrix
from .extremality import certify_extreme
from .flags import Flag, FlagError, FlagShape, random_rational_flag
from .groups import GroupError, GroupOverflow, close, invariant_report, orbit
from .lattice import BudgetExceeded, minimal_vectors
from .serialize import SCHEMA, dumps, exact, float_diagnostic

EXIT_OK, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3


class InputError(ValueError):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals:
        raise InputError("empty integer list")
    return vals


def _envelope(command: str, inputs: dict, cfg: Config, result: dict, timing: float | None) -> dict:
    out = {"schema": SCHEMA, "version": __version__, "command": command, "input": inputs,
           "config": cfg.to_json(), "result": result}
    if timing is not None:
        out["timing_seconds"] = float_diagnostic(timing)
    return out


# -- certify -----------------------------------------------------------------
def cmd_certify(args, cfg: Config) -> tuple[dict, str]:
    L = load_lattice(args.lattice)
    lam = _int_list(args.lam)
    try:
        Partition(lam)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = certify_extreme(L, lam, cfg.threads, cfg.c_matrix_cap, cfg.lp_cap, node_budget=cfg.node_budget)
    res = report.to_json()
    lines = [f"lattice {L.name or args.lattice}, lambda = {list(lam)}",
             f"s_lambda = {report.s}",
             f"gamma = {report.gamma[0]} / {report.gamma[1]}^({report.gamma[2]})  ~ {report.gamma_float:.6f}",
             f"4-design: {report.design.passed} (strength verified {report.design.strength_verified})",
             f"strongly eutactic: {report.strongly_eutactic}, eutactic: {report.eutactic}",
             f"perfect: {report.perfect} (rank {report.perfection_rank})",
             f"verdict: {report.verdict}"]
    return res, "\n".join(lines)


# -- group-orbit ---------------------------------------------------------------
def cmd_group_orbit(args, cfg: Config) -> tuple[dict, str]:
    if args.strength not in (2, 4, 6):
        raise InputError("strength must be 2, 4 or 6")
    res: dict = {}
    G = None
    if args.generators:
        n, gens = load_generators(args.generators)
        try:
            G = close(gens, cfg.max_group_order)
            source = G
            res["order"] = G.order
        except GroupOverflow:
            if not args.classes:
                raise
            source = None
    if G is None:
        if not args.classes:
            raise InputError("need --generators or --classes")
        source = load_class_data(args.classes)
        res["order"] = source.order
        res["source"] = "class data"
    else:
        res["source"] = "enumerated closure"
    rep = invariant_report(source, args.strength)
    res["invariants"] = rep["degrees"]
    res["verdict"] = rep["verdict"]
    if args.shape:
        if G is None:
            raise InputError("materializing an orbit needs an enumerable generator file")
        shape = FlagShape(_int_list(args.shape), G.n)
        rng = np.random.default_rng(cfg.seed)
        F = random_rational_flag(shape, rng)
        D = orbit(F, G)
        cert = is_design(D, min(args.strength, 5), cfg.threads)
        res["orbit"] = {"shape": shape.to_json(), "size": len(D), "seed": cfg.seed,
                        "certificate": cert.to_json(), "agrees": cert.passed == rep["verdict"] or not rep["verdict"]}
    lines = [f"group order {res['order']} ({res['source']})"]
    lines += [f"  degree {r['k']}: invariant dim {r['invariant_dim']}, reference {r['reference_dim']}"
              for r in rep["degrees"]]
    lines.append(f"every flag orbit is a {args.strength}-design: {rep['verdict']}")
    if "orbit" in res:
        lines.append(f"materialized orbit of size {res['orbit']['size']}: "
                     f"design test passed = {res['orbit']['certificate']['passed']}")
    return res, "\n".join(lines)


# -- design-test --------------------------------------------------------------
def _load_vectors(args, cfg: Config):
    if args.lattice:
        L = load_lattice(args.lattice)
        mu, half = minimal_vectors(L, cfg.threads, cfg.node_budget)
        V = [list(v) for v in half] + [[-x for x in v] for v in half]
        return V, L.gram, {"lattice": L.name, "minimum": str(mu)}
    obj = json.loads(resolve(args.vectors).read_text())
    V = [[Fraction(x) for x in v] for v in obj["vectors"]]
    gram = obj.get("gram")
    G = RatMatrix.from_rows([[Fraction(x) for x in r] for r in gram]) if gram else None
    return V, G, {"vectors_file": str(args.vectors)}


def cmd_design_test(args, cfg: Config) -> tuple[dict, str]:
    t = args.strength
    res: dict = {}
    if args.flags:
        obj = json.loads(resolve(args.flags).read_text())
        items = obj["flags"] if isinstance(obj, dict) else obj
        flags = [Flag.from_json(f) for f in items]
        weights = obj.get("weights") if isinstance(obj, dict) else None
        D = FlagSet.from_flags(flags, weights)
        V = None
    else:
        V, G, meta = _load_vectors(args, cfg)
        res["input"] = meta
        res["count"] = len(V)
        D = None
    lines = []
    if args.pair_sum:
        if V is None:
            raise InputError("--pair-sum needs vectors")
        if t % 2:
            raise InputError("pair-sum strength must be even")
        sums = pair_sums(V, list(range(2, t + 1, 2)), G, cfg.threads)
        res["pair_sum"] = [{"t": k, "lhs": exact(a), "rhs": exact(b), "passed": a == b} for k, (a, b) in sums.items()]
        res["passed"] = all(a == b for a, b in sums.values())
        lines += [f"t={k}: {'pass' if a == b else 'fail'} ({a} vs {b})" for k, (a, b) in sums.items()]
    else:
        if not 1 <= t <= 5:
            raise InputError("moment test strength must be between 1 and 5")
        if D is None:
            if any(Fraction(x).denominator != 1 for v in V for x in v):
                raise InputError("vector inputs for the moment test must be integral")
            ints = [[int(x) for x in v] for v in V]
            D = FlagSet.from_vectors(ints, G)
        cert = is_design(D, t, cfg.threads)
        res["certificate"] = cert.to_json()
        res["passed"] = cert.passed
        for v in cert.verdicts:
            line = f"degree {v['degree']} {v.get('iota')},{v.get('iota2', v.get('iota'))}: {'pass' if v['passed'] else 'fail'}"
            if "witness" in v:
                w = v["witness"]
                line += f" at entry {tuple(w['entry'])}: {w['got']} vs {w['expected']}"
            lines.append(line)
    return res, "\n".join(lines) or "no checks run"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vexillar", description="Exact certificates for vexillar designs and lattice extremality.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with budget overrides")
        sp.add_argument("--threads", type=int, help="worker processes (affects wall time only)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--summary", action="store_true", help="print a human-readable summary instead of JSON")
        sp.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
        sp.add_argument("--output", "-o", help="write the JSON report to this file")

    c = sub.add_parser("certify", help="minimal flags, design, eutaxy and perfection of a lattice")
    c.add_argument("--lattice", required=True, help="catalog name or lattice JSON file")
    c.add_argument("--lambda", dest="lam", required=True, help="partition, e.g. 1 or 2,1")
    common(c)

    g = sub.add_parser("group-orbit", help="invariant-dimension criterion for group orbits")
    g.add_argument("--generators", help="generator JSON file or catalog name")
    g.add_argument("--classes", help="class-data JSON file or catalog name")
    g.add_argument("--strength", type=int, required=True)
    g.add_argument("--shape", help="materialize one orbit of a random exact flag of this shape, e.g. 2,1")
    common(g)

    d = sub.add_parser("design-test", help="exact design test for flags or vectors")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--flags", help="JSON file with a list of flags")
    src.add_argument("--vectors", help="JSON file {vectors, gram?}")
    src.add_argument("--lattice", help="use the minimal vectors of a catalog lattice")
    d.add_argument("--strength", type=int, required=True)
    d.add_argument("--pair-sum", action="store_true", help="pair-sum test at every even strength up to --strength")
    common(d)
    return p


COMMANDS = {"certify": cmd_certify, "group-orbit": cmd_group_orbit, "design-test": cmd_design_test}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config.from_file(args.config) if args.config else Config()
        cfg = cfg.with_overrides(threads=args.threads, seed=args.seed)
    except (OSError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    try:
        result, summary = COMMANDS[args.command](args, cfg)
    except (BudgetExceeded, GroupOverflow) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, CatalogError, FlagError, GroupError, LinAlgError, KeyError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    elapsed = time.perf_counter() - start if args.timing else None
    inputs = {k: v for k, v in vars(args).items() if k not in ("summary", "timing", "output", "config") and v is not None}
    text = dumps(_envelope(args.command, inputs, cfg, result, elapsed))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    if args.summary:
        print(summary)
    elif not args.output:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
