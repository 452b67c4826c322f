"""Command-line front end.

Exit codes: 0 success / equilibrium, 1 negative answer (not an equilibrium,
no equilibrium found, reproduction check failed), 2 bad input.
Human-readable tables go to stdout unless ``--json`` or ``--csv`` is given.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

from .equilibrium import (
    GridSpec,
    enumerate_equilibria,
    report_from_scan,
    scan_equilibria,
    verify_equilibrium,
    write_equilibria_csv,
    write_equilibria_jsonl,
)
from .equilibrium.search import default_jobs
from .errors import AuctionError, NoEquilibriumFound, ParseError
from .instances import (
    LowerBoundParams,
    gen_lower_bound,
    gen_random,
    load_instance,
    lower_bound_profiles,
    lower_bound_ratio,
    save_instance,
    save_manifest,
)
from .mechanisms import Mechanism, check_no_over, gsp_click_prices, outcome
from .model import as_matrix_profile, as_scalar_profile
from .welfare import optimal_assignment, social_welfare

log = logging.getLogger("posauction")

CSV_COLUMNS = ["player", "position", "bid", "payment", "utility", "lw_contrib"]


def _fmt(x: float) -> str:
    if x == -math.inf:
        return "-inf"
    if x == math.inf:
        return "inf"
    return f"{x:.10g}"


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "-inf" if x < 0 else "inf"
    return x


def parse_bids(text: str, mech: Mechanism):
    """Bids from a JSON file, inline JSON, ``"1.01,1"`` or ``"1.001,0;1,0"``."""
    if os.path.exists(text):
        try:
            with open(text) as fp:
                data = json.load(fp)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{text}: invalid JSON: {exc}") from exc
        if isinstance(data, dict):
            data = data.get("bids")
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            try:
                rows = [[float(x) for x in row.split(",")] for row in text.split(";")]
            except ValueError as exc:
                raise ParseError(f"cannot parse bids {text!r}") from exc
            data = rows if ";" in text else rows[0]
    if not isinstance(data, list):
        raise ParseError("bids must be a list (scalar mechanisms) or a list of rows (EGFP)")
    matrix = bool(data) and all(isinstance(r, list) for r in data)
    if mech.scalar:
        if matrix:
            raise ParseError(f"{mech.value} takes one scalar bid per player")
        return as_scalar_profile(data)
    if not matrix:
        raise ParseError("EGFP takes one bid row per player, e.g. '1.001,0;1,0'")
    return as_matrix_profile(data)


def _add_mech(p):
    p.add_argument("--mech", required=True, type=Mechanism.parse, help="GSP, VCG or EGFP")


def cmd_eval(args) -> int:
    inst = load_instance(args.instance)
    mech = args.mech
    bids = parse_bids(args.bids, mech)
    out = outcome(mech, inst, bids)
    lw_parts = [min(inst.ctrs[out.sigma[i]] * inst.valuations[i], inst.budgets[i]) for i in range(inst.n)]
    own_bid = [bids[i] if mech.scalar else bids[i][out.sigma[i]] for i in range(inst.n)]
    rows = [
        [i + 1, out.sigma[i] + 1, own_bid[i], out.payments[i], out.utilities[i], lw_parts[i]]
        for i in range(inst.n)
    ]
    no_over = check_no_over(inst, bids) if mech.scalar else None
    prices = gsp_click_prices(inst, bids) if mech is Mechanism.GSP else None
    lw = sum(lw_parts)
    sw = social_welfare(inst, out.assignment)
    _, opt_lw = optimal_assignment(inst)

    if args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(CSV_COLUMNS)
        for row in rows:
            w.writerow([row[0], row[1]] + [_fmt(x) for x in row[2:]])
        return 0
    if args.json:
        data = {"mechanism": mech.value, **out.to_json(), "lw": lw, "sw": sw, "opt_lw": opt_lw}
        if no_over is not None:
            data["no_over"] = list(no_over)
        if prices is not None:
            data["click_prices"] = list(prices)
        print(json.dumps(data, indent=2))
        return 0

    header = ["player", "position", "bid", "payment", "utility", "lw_contrib"]
    if prices is not None:
        header.append("click_price")
    if no_over is not None:
        header.append("no_over")
    print(f"{mech.value} outcome, sigma = {out.assignment.one_based()}")
    print("  ".join(f"{h:>12}" for h in header))
    for i, row in enumerate(rows):
        cells = [str(row[0]), str(row[1])] + [_fmt(x) for x in row[2:]]
        if prices is not None:
            cells.append(_fmt(prices[i]))
        if no_over is not None:
            cells.append("ok" if no_over[i] else "VIOLATED")
        print("  ".join(f"{c:>12}" for c in cells))
    print(f"LW = {_fmt(lw)}   SW = {_fmt(sw)}   optimal LW = {_fmt(opt_lw)}")
    return 0


def _describe_deviation(dev, mech: Mechanism) -> str:
    where = "rank" if mech.scalar else "position"
    bid = dev.witness if dev.witness is not None else dev.required_bid
    op = ">" if dev.strict and dev.witness is None else "="
    return (f"player {dev.player + 1} -> {where} {dev.target + 1} (bid {op} {_fmt(bid)}), "
            f"utility {_fmt(dev.deviation_utility)}, gain {_fmt(dev.gain)}")


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    mech = args.mech
    bids = parse_bids(args.bids, mech)
    rep = verify_equilibrium(mech, inst, bids, args.theta)
    if args.json:
        print(json.dumps(rep.to_json(), indent=2))
    else:
        verdict = "EQUILIBRIUM" if rep.is_equilibrium else "NOT an equilibrium"
        print(f"{mech.value} profile {rep.profile.to_json()}: {verdict} (theta = {rep.theta:g})")
        print(f"sigma = {rep.outcome.assignment.one_based()}, utilities = "
              f"{[_fmt(u) for u in rep.outcome.utilities]}, LW = {_fmt(rep.lw)}")
        for dev in rep.best_deviations:
            if dev is not None:
                print("  best deviation: " + _describe_deviation(dev, mech))
    return 0 if rep.is_equilibrium else 1


def _batch_seeds(spec: str) -> range:
    try:
        lo, hi = spec.split(":")
        return range(int(lo), int(hi))
    except ValueError:
        raise ParseError(f"--seeds expects START:STOP, got {spec!r}") from None


def cmd_lpoa(args) -> int:
    mech = args.mech
    grid = GridSpec(args.grid, args.theta)
    if args.instance:
        inst = load_instance(args.instance)
        scan = scan_equilibria(mech, inst, grid, jobs=args.jobs)
        try:
            rep = report_from_scan(scan)
        except NoEquilibriumFound as exc:
            print(f"no equilibrium found: {exc}", file=sys.stderr)
            return 1
        if args.jsonl or args.csv:
            reports = enumerate_equilibria(mech, inst, grid, jobs=args.jobs)
            if args.jsonl:
                with open(args.jsonl, "w") as fp:
                    write_equilibria_jsonl(reports, fp)
            if args.csv:
                write_equilibria_csv(reports, sys.stdout)
                return 0
        if args.json:
            print(json.dumps(rep.to_json(), indent=2))
        else:
            print(f"{mech.value}: {rep.equilibria_found} equilibria among {rep.profiles_scanned} grid profiles")
            print(f"optimal LW = {_fmt(rep.opt_lw)} at sigma {rep.opt_assignment.one_based()}")
            print(f"equilibrium LW in [{_fmt(rep.min_eq_lw)}, {_fmt(rep.max_eq_lw)}]")
            print(f"LPoA = {rep.lpoa:.6f}   LPoS = {rep.lpos:.6f}")
        return 0

    if args.n is None or args.seeds is None:
        raise ParseError("give --instance FILE, or --n and --seeds START:STOP for a random batch")
    results = []
    for seed in _batch_seeds(args.seeds):
        inst = gen_random(seed, args.n, budget_factor=args.budget_factor)
        try:
            rep = report_from_scan(scan_equilibria(mech, inst, grid, jobs=args.jobs))
            results.append({"seed": seed, "n": args.n, **rep.to_json()})
        except NoEquilibriumFound:
            results.append({"seed": seed, "n": args.n, "mechanism": mech.value, "equilibria_found": 0})
    found = [r for r in results if r["equilibria_found"]]
    if args.json:
        print(json.dumps(results, indent=2))
    elif args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(["seed", "n", "opt_lw", "min_eq_lw", "max_eq_lw", "lpoa", "lpos", "equilibria"])
        for r in results:
            w.writerow([r["seed"], r["n"], r.get("opt_lw", ""), r.get("min_eq_lw", ""),
                        r.get("max_eq_lw", ""), r.get("lpoa", ""), r.get("lpos", ""), r["equilibria_found"]])
    else:
        print(f"{'seed':>6} {'equilibria':>10} {'lpoa':>10} {'lpos':>10}")
        for r in results:
            if r["equilibria_found"]:
                print(f"{r['seed']:>6} {r['equilibria_found']:>10} {r['lpoa']:>10.6f} {r['lpos']:>10.6f}")
            else:
                print(f"{r['seed']:>6} {0:>10} {'-':>10} {'-':>10}")
        if found:
            print(f"max lpoa over batch: {max(r['lpoa'] for r in found):.6f} (upper bound 2)")
    return 0 if found else 1


def cmd_lower_bound(args) -> int:
    mech = args.mech
    params = LowerBoundParams(args.lam, args.eps)
    inst = gen_lower_bound(params)
    fixture = lower_bound_profiles(params, args.delta)[mech]
    theta = args.theta
    if theta is None:
        theta = 0.0 if mech.scalar else args.delta
    rep = verify_equilibrium(mech, inst, fixture, theta)
    scan = scan_equilibria(mech, inst, GridSpec(args.grid), theta)
    bad = [s for s in scan.assignments() if s == (1, 0)]
    opt, opt_lw = optimal_assignment(inst)
    ratio = opt_lw / rep.lw
    expected = lower_bound_ratio(params)
    checks = {
        "fixture is an equilibrium": rep.is_equilibrium,
        "no equilibrium induces (2,1)": not bad,
        "optimum is (2,1)": opt.sigma == (1, 0),
        "ratio matches 2*lam/((1+eps)*lam+1)": abs(ratio - expected) <= 1e-9,
    }
    if args.json:
        print(json.dumps({
            "mechanism": mech.value, "lam": args.lam, "eps": args.eps, "delta": args.delta,
            "theta": theta, "instance": inst.to_dict(), "fixture": rep.to_json(),
            "grid_equilibria": len(scan), "grid_profiles": scan.scanned,
            "ratio": ratio, "closed_form": expected, "limit": 2.0,
            "checks": checks,
        }, indent=2, default=_json_safe))
    else:
        print(f"{mech.value}, lam = {args.lam:g}, eps = {args.eps:g}: instance {inst.to_dict()}")
        print(f"fixture {fixture.to_json()} -> sigma {rep.outcome.assignment.one_based()}, utilities "
              f"{[_fmt(u) for u in rep.outcome.utilities]}, LW = {_fmt(rep.lw)} (theta = {theta:g})")
        print(f"grid of {args.grid} levels: {len(scan)} equilibria among {scan.scanned} profiles, "
              f"assignments {sorted(tuple(j + 1 for j in s) for s in scan.assignments())}")
        for name, ok in checks.items():
            print(f"  {'PASS' if ok else 'FAIL'}  {name}")
        print(f"optimal LW / equilibrium LW = {ratio:.10f} (closed form {expected:.10f}; tends to 2 as lam grows)")
    return 0 if all(checks.values()) else 1


def cmd_gen(args) -> int:
    if args.family == "lower-bound":
        params = {"lam": args.lam, "eps": args.eps}
        inst = gen_lower_bound(LowerBoundParams(args.lam, args.eps))
        seed = None
    else:
        params = {"n": args.n, "budget_factor": args.budget_factor}
        inst = gen_random(args.seed, args.n, budget_factor=args.budget_factor)
        seed = args.seed
    if args.output in (None, "-"):
        save_instance(inst, sys.stdout)
    else:
        save_instance(inst, args.output)
    if args.manifest:
        save_manifest(args.manifest, seed, args.family, params)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posauction", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a bid profile")
    _add_mech(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--bids", required=True, help="JSON file or inline: '1.01,1' or '1.001,0;1,0'")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="check whether a profile is a (theta-)equilibrium")
    _add_mech(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--bids", required=True)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lpoa", help="empirical liquid price of anarchy / stability")
    _add_mech(p)
    p.add_argument("--instance")
    p.add_argument("--n", type=int, help="players per random instance (batch mode)")
    p.add_argument("--seeds", "--seed", dest="seeds", help="seed range START:STOP (batch mode)")
    p.add_argument("--budget-factor", type=float, default=2.0)
    p.add_argument("--grid", type=int, default=20, help="bid levels per player")
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--jobs", type=int, default=default_jobs())
    p.add_argument("--jsonl", help="write every equilibrium as a JSON line to this file")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_lpoa)

    p = sub.add_parser("lower-bound", help="reproduce the two-player lower-bound game")
    _add_mech(p)
    p.add_argument("--lam", type=float, default=100.0)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--theta", type=float, default=None, help="defaults to 0 (GSP/VCG) or delta (EGFP)")
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lower_bound)

    p = sub.add_parser("gen", help="write an instance JSON file")
    p.add_argument("--family", choices=["lower-bound", "random"], required=True)
    p.add_argument("--lam", type=float, default=100.0)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--budget-factor", type=float, default=2.0)
    p.add_argument("-o", "--output")
    p.add_argument("--manifest", help="also write an experiment manifest here")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (AuctionError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
