"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import harness
from .constraints import at_most_edges, parse_constraint_spec
from .graph_core import ArgumentError, format_fraction
from .greedy import (
    Adversarial, GreedyTrace, Lexicographic, MinTrueWeight, SeededRandom, check_pairwise_stability,
    enumerate_greedy_runs, omniscient_greedy, ordinal_greedy, validate_trace,
)
from .instances import FAMILIES, dumps, generate, load
from .oracles import MAX_BRUTE_N, brute_force_opt, ratio

CSV_VERSION = 1
POLICIES = ("lex", "random", "adversarial", "min-weight")


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return ""
    if x == math.inf:
        return "inf"
    return format_fraction(Fraction(x))


def _dec(x) -> str:
    return "inf" if x == math.inf else f"{float(x):.6f}"


def _bundle_and_system(args):
    bundle = load(args.instance)
    if args.constraints:
        sys_ = parse_constraint_spec(args.constraints, bundle.instance.n)
    elif bundle.constraints is not None:
        sys_ = bundle.constraints
    else:
        raise UsageError("no constraints given: pass --constraints or add a 'constraints' line")
    return bundle, sys_


def _policy(name: str, seed: int, bundle):
    if name == "lex":
        return Lexicographic()
    if name == "random":
        return SeededRandom(seed)
    if name == "adversarial":
        return bundle.policy if isinstance(bundle.policy, Adversarial) else Adversarial(())
    if name == "min-weight":
        print("note: min-weight policy reads the hidden weights (testing aid)", file=sys.stderr)
        return MinTrueWeight(bundle.instance)
    raise UsageError(f"unknown policy {name!r}")


def cmd_solve(args) -> int:
    bundle, sys_ = _bundle_and_system(args)
    trace = ordinal_greedy(bundle.profile, sys_, _policy(args.policy, args.seed, bundle))
    total = bundle.instance.total(trace.solution)
    out = sys.stdout
    out.write(trace.dump())
    out.write(f"weight {_fmt(total)} ({_dec(total)})\n")
    out.write("edges " + " ".join(f"{i}-{j}" for i, j in sorted(trace.solution)) + "\n")
    return 0


def _run_weight(job) -> Fraction:
    inst, prof, sys_, policy = job
    return inst.total(ordinal_greedy(prof, sys_, policy).solution)


def _compare_row(bundle, sys_, n_random: int, seed: int, enumerate_runs: bool):
    inst, prof = bundle.instance, bundle.profile
    if enumerate_runs:
        runs = enumerate_greedy_runs(prof, sys_)
        if not runs.complete:
            print("warning: run enumeration hit its cap; worst/best are over explored runs", file=sys.stderr)
        found = [s.total_weight for s in runs.weighted(inst)]
    else:
        policies = [Lexicographic()]
        if isinstance(bundle.policy, Adversarial):
            policies.append(bundle.policy)
        policies += [SeededRandom(seed + i) for i in range(n_random)]
        found = harness.pmap(_run_weight, [(inst, prof, sys_, p) for p in policies])
    worst, best = min(found), max(found)
    omni = inst.total(omniscient_greedy(inst, sys_).solution)
    opt = brute_force_opt(inst, sys_) if inst.n <= MAX_BRUTE_N else None
    if opt is not None:
        bound = harness.tightest_bound(sys_, opt.edges)
        q = ratio(opt.total_weight, worst)
        ok = "true" if harness.within(opt.total_weight, worst, bound) else "false"
        opt_w = opt.total_weight
    else:
        bound = min(v for k, v in harness.ratio_bounds(sys_, []).items() if k != "sparse")
        q, ok, opt_w = None, "", None
    return {
        "ordinal_worst_found": _fmt(worst),
        "ordinal_best_found": _fmt(best),
        "omniscient": _fmt(omni),
        "optimal": _fmt(opt_w),
        "worst_ratio": _fmt(q),
        "ratio_bound": _fmt(bound),
        "bound_satisfied": ok,
    }


COMPARE_FIELDS = ["instance", "constraints", "ordinal_worst_found", "ordinal_best_found", "omniscient",
                  "optimal", "worst_ratio", "ratio_bound", "bound_satisfied"]


def cmd_compare(args) -> int:
    bundle, sys_ = _bundle_and_system(args)
    row = _compare_row(bundle, sys_, args.random_policies, args.seed, args.enumerate)
    row = {"instance": Path(args.instance).name, "constraints": sys_.spec(), **row}
    buf = io.StringIO()
    buf.write(f"# ordinal-greedy compare v{CSV_VERSION}\n")
    w = csv.DictWriter(buf, COMPARE_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerow(row)
    _emit(buf.getvalue(), args.csv)
    return 0 if row["bound_satisfied"] != "false" else 1


SWEEP_FIELDS = ["family", "size", "n", "greedy", "optimal", "ratio", "ratio_decimal", "bound", "greedy_executed"]


def cmd_sweep(args) -> int:
    fams = args.family or list(harness.FAMILY_BOUNDS)
    buf = io.StringIO()
    buf.write(f"# ordinal-greedy sweep v{CSV_VERSION}\n")
    w = csv.DictWriter(buf, SWEEP_FIELDS, lineterminator="\n")
    w.writeheader()
    status = 0
    notes = []
    for fam in fams:
        rows = harness.sweep_family(fam, args.sizes)
        for r in rows:
            w.writerow({"family": r.family, "size": r.size, "n": r.n, "greedy": _fmt(r.greedy),
                        "optimal": _fmt(r.optimal), "ratio": _fmt(r.ratio),
                        "ratio_decimal": _dec(r.ratio), "bound": _fmt(r.bound),
                        "greedy_executed": str(r.executed).lower()})
        mono = harness.is_monotone(rows)
        notes.append(f"{fam}: {'monotone' if mono else 'NOT monotone'} towards bound {_fmt(rows[-1].bound)}")
        if not mono:
            status = 1
    _emit(buf.getvalue(), args.csv)
    for line in notes:
        print(line, file=sys.stderr)
    return status


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _verify_trace(args) -> int:
    bundle, sys_ = _bundle_and_system(args)
    trace = GreedyTrace.parse(Path(args.trace).read_text(), n=bundle.instance.n)
    try:
        validate_trace(trace, bundle.profile, sys_)
    except ArgumentError as exc:
        print(f"FAIL trace: {exc}")
        return 1
    print(f"PASS trace: {len(trace.added)} edges added, weight {_fmt(bundle.instance.total(trace.solution))}")
    if sys_.b <= 6:
        verdict = check_pairwise_stability(bundle.instance, sys_, trace.solution)
        if verdict is not True:
            print(f"FAIL stability: {verdict}")
            return 1
        print("PASS stability")
    return 0


def cmd_verify(args) -> int:
    if args.trace or args.instance:
        if not (args.trace and args.instance):
            raise UsageError("--trace and --instance go together")
        return _verify_trace(args)
    extra = [at_most_edges(2)] if args.inject_faulty else []
    report = harness.run_verify(trials=args.trials, max_n=args.max_n, seed=args.seed,
                                families=not args.no_families, extra_oracles=extra)
    for line in report.lines():
        print(line)
    out_dir = Path(args.out) if args.out else None
    for r in report.results:
        if r.passed or r.counterexample is None:
            continue
        text = dumps(r.counterexample)
        if out_dir:
            out_dir.mkdir(parents=True, exist_ok=True)
            safe = "".join(ch if ch.isalnum() else "_" for ch in r.name).strip("_")
            path = out_dir / f"{safe}.txt"
            path.write_text(text)
            print(f"counterexample for {r.name} written to {path}")
        else:
            print(f"--- counterexample for {r.name} ---")
            print(text, end="")
    print("verify: " + ("PASS" if report.passed else "FAIL"))
    return 0 if report.passed else 1


def _param_value(text: str):
    for conv in (int, Fraction, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def cmd_gen(args) -> int:
    params = {}
    for item in args.param:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        params[key] = value if key == "constraints" else _param_value(value)
    bundle = generate(args.family, **params)
    _emit(dumps(bundle), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ordinal-greedy", description="Ordinal Greedy for ABC constraint systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def instance_args(sp):
        sp.add_argument("instance", help="instance file")
        sp.add_argument("--constraints", help="e.g. 'A=all b=1 c=n'; overrides the file")

    sp = sub.add_parser("solve", help="run Ordinal Greedy and print the trace")
    instance_args(sp)
    sp.add_argument("--policy", choices=POLICIES, default="lex")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("compare", help="ordinal vs omniscient vs optimal, as CSV")
    instance_args(sp)
    sp.add_argument("--random-policies", type=int, default=16)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--enumerate", action="store_true", help="explore every greedy run")
    sp.add_argument("--csv", help="write CSV here instead of stdout")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep", help="ratios of the adversarial families over growing sizes")
    sp.add_argument("--family", action="append", choices=sorted(harness.FAMILY_BOUNDS))
    sp.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32])
    sp.add_argument("--csv", help="write CSV here instead of stdout")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run the invariant suite, or check a trace file")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--max-n", type=int, default=7)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-families", action="store_true", help="skip the adversarial family checks")
    sp.add_argument("--out", help="directory for counterexample bundles")
    sp.add_argument("--trace", help="trace dump to validate (with --instance)")
    sp.add_argument("--instance", help="instance the trace belongs to")
    sp.add_argument("--constraints", help="override the instance's constraints")
    sp.add_argument("--inject-faulty", action="store_true", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gen", help="write a generated instance in the text format")
    sp.add_argument("family", choices=sorted(FAMILIES))
    sp.add_argument("--param", action="append", default=[], help="key=value, e.g. k=5 or eps=1/1000")
    sp.add_argument("-o", "--output", help="file to write (default stdout)")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ArgumentError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
