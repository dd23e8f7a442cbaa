"""Invariant suite behind ``ordinal-greedy verify`` and ``sweep``.

Every check returns plain :class:`CheckResult` records; failing checks carry
an :class:`InstanceBundle` that reproduces the problem.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .constraints import (
    Acyclic, AllSubgraphs, AttachmentOracle, ConstraintSystem, EliminationCause, MAX_AXIOM_N,
    NoShortCycles, Planar, PlanarBridged, builtin_attachment, parse_constraint_spec, verify_axioms,
)
from .graph_core import ArgumentError, EdgeSet, build_partial_order, edge
from .greedy import (
    MAX_STABILITY_B, GreedyTrace, MinTrueWeight, SeededRandom, check_pairwise_stability,
    enumerate_greedy_runs, omniscient_greedy, ordinal_greedy, validate_trace,
)
from .instances import (
    InstanceBundle, closed_form, matching_tight, mst_example1, abc_example2, planar_lower,
    random_instance, tsp_lower,
)
from .oracles import (
    MAX_BRUTE_N, InvariantViolation, binary_reduce, brute_force_opt, held_karp_max_tsp, kruskal_mst,
    ratio, sparsity,
)

SWEEP_SPECS = (
    "A=acyclic b=max c=n",
    "A=all b=1 c=n",
    "A=all b=2 c=n",
    "A=all b=3 c=n",
    "A=all b=max c=2",
    "A=all b=max c=3",
    "A=planar b=max c=n",
    "A=tsp b=2 c=n",
)
MST_SPEC = "A=acyclic b=max c=n"
TSP_SPEC = "A=tsp b=2 c=n"
THREADS_ENV = "ORDINAL_GREEDY_THREADS"


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    cpus = os.cpu_count() or 1
    if not raw:
        return cpus
    try:
        return max(1, min(int(raw), cpus))
    except ValueError:
        raise ArgumentError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def pmap(fn: Callable, items: Sequence) -> List:
    """Ordered map, fanned out over processes when more than one worker is allowed."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def spec_for(spec: str, n: int) -> Optional[ConstraintSystem]:
    """Parsed constraint system, or None when the spec makes no sense at this n."""
    try:
        return parse_constraint_spec(spec, n)
    except ArgumentError:
        return None


def ratio_bounds(sys: ConstraintSystem, opt_edges) -> Dict[str, Fraction]:
    """Every applicable upper bound on opt/sol, keyed by a short name."""
    b, c, n = sys.b, sys.c, sys.n
    out = {"abc": Fraction(b + 1)}
    if c == n:
        d = sparsity(opt_edges).d
        out["sparse"] = max(Fraction(2), d + 1)
        a = sys.attachment
        if isinstance(a, AllSubgraphs):
            out["b_matching"] = Fraction(2)
        elif isinstance(a, Acyclic) and b == n - 1:
            out["spanning_tree"] = Fraction(2)
        elif isinstance(a, NoShortCycles) and b == 2:
            out["tsp"] = Fraction(2)
        elif type(a) is Planar and b == n - 1:
            out["planar"] = Fraction(4)
    return out


def tightest_bound(sys: ConstraintSystem, opt_edges) -> Fraction:
    return min(ratio_bounds(sys, opt_edges).values())


def within(opt: Fraction, sol: Fraction, bound: Fraction) -> bool:
    """opt/sol <= bound, exactly, with 0/0 read as 1."""
    if sol == 0:
        return opt == 0
    return opt <= bound * sol


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    counterexample: Optional[InstanceBundle] = None
    warning: str = ""


@dataclass
class InstanceOutcome:
    failures: List[str] = field(default_factory=list)
    solutions: int = 0
    worst_ratio: object = Fraction(1)
    stable_checked: int = 0


def local_monotonicity_failures(trace: GreedyTrace, prof) -> List[str]:
    """Eliminated edges must be dominated by every adjacent solution edge added no later."""
    po = build_partial_order(prof)
    out = []
    added_at = {s.edge: s.iteration for s in trace.steps if s.cause is EliminationCause.ADDED}
    for s in trace.steps:
        if s.cause is EliminationCause.ADDED:
            continue
        near = [a for a, it in added_at.items() if it <= s.iteration and set(a) & set(s.edge)]
        if not near:
            out.append(f"{s.edge} eliminated ({s.cause.value}) with no adjacent solution edge")
        for a in near:
            if not po.dominates(a, s.edge):
                out.append(f"{s.edge} eliminated but adjacent solution edge {a} does not dominate it")
    return out


def check_instance(bundle: InstanceBundle, sys: ConstraintSystem, *, stability: bool = True,
                   reduce: bool = False) -> InstanceOutcome:
    inst, prof, _, _ = bundle
    res = InstanceOutcome()
    opt = brute_force_opt(inst, sys)
    runs = enumerate_greedy_runs(prof, sys)
    if not runs.complete:
        res.failures.append("run enumeration hit its cap")
    bounds = ratio_bounds(sys, opt.edges)
    for sol in runs.weighted(inst):
        res.solutions += 1
        if not sys.is_feasible(sol.edges):
            res.failures.append(f"infeasible solution {sorted(sol.edges)}")
            continue
        q = ratio(opt.total_weight, sol.total_weight)
        if q > res.worst_ratio:
            res.worst_ratio = q
        for name, bound in bounds.items():
            if not within(opt.total_weight, sol.total_weight, bound):
                res.failures.append(f"ratio {q} exceeds {name} bound {bound} for {sorted(sol.edges)}")
        if stability and sys.b <= MAX_STABILITY_B:
            verdict = check_pairwise_stability(inst, sys, sol)
            res.stable_checked += 1
            if verdict is not True:
                res.failures.append(f"blocking pair {verdict}")
    for policy in (SeededRandom(0), MinTrueWeight(inst)):
        trace = ordinal_greedy(prof, sys, policy)
        if trace.solution not in runs.solutions and runs.complete:
            res.failures.append(f"{type(policy).__name__} run not among enumerated runs")
        try:
            validate_trace(trace, prof, sys)
        except ArgumentError as exc:
            res.failures.append(f"trace replay: {exc}")
        res.failures.extend(local_monotonicity_failures(trace, prof))
        current = EdgeSet(sys.n, trace.solution)
        for s in trace.steps:
            if s.cause is not EliminationCause.ADDED and sys.cause(current, s.edge) is EliminationCause.ADDED:
                res.failures.append(f"solution not maximal: {s.edge} still fits")
        if reduce:
            try:
                red = binary_reduce(inst, prof, trace, sys, opt=opt)
                if not red.unbounded and red.new_ratio < red.delta:
                    res.failures.append("binary reduction lowered the ratio")
            except InvariantViolation as exc:
                res.failures.append(f"binary reduction: {exc}")
    return res


def _random_job(args) -> Tuple[int, str, int, InstanceOutcome]:
    seed, spec, n, reduce = args
    bundle = random_instance(n, seed=seed, constraints=spec)
    return seed, spec, n, check_instance(bundle, bundle.constraints, reduce=reduce)


def _agreement_job(args) -> List[str]:
    seed, n = args
    out = []
    bundle = random_instance(n, seed=seed, constraints=MST_SPEC)
    inst = bundle.instance
    mst = parse_constraint_spec(MST_SPEC, n)
    k = kruskal_mst(inst).total_weight
    if brute_force_opt(inst, mst).total_weight != k:
        out.append("kruskal_mst disagrees with brute force")
    if inst.total(omniscient_greedy(inst, mst).solution) != k:
        out.append("omniscient greedy disagrees with kruskal_mst")
    if n >= 3:
        tsp = parse_constraint_spec(TSP_SPEC, n)
        if held_karp_max_tsp(inst).total_weight != brute_force_opt(inst, tsp).total_weight:
            out.append("held_karp_max_tsp disagrees with brute force")
    return out


def check_axioms(extra_oracles: Iterable[AttachmentOracle] = (), max_n: int = MAX_AXIOM_N) -> List[CheckResult]:
    out = []
    top = min(max_n, MAX_AXIOM_N)
    for kind in ("all", "acyclic", "planar", "tsp", "planar_lower"):
        bad = None
        for n in range(3, top + 1):
            oracle = builtin_attachment(kind, n=n, forbidden=[edge(2 * i, 2 * i + 1) for i in range(n // 2)] if kind == "planar_lower" else None)
            rep = verify_axioms(oracle, n)
            if not rep.ok:
                bad = f"n={n}: {rep.counterexample}"
                break
        out.append(CheckResult(f"axioms[{kind}]", bad is None, bad or f"n<={top}"))
    for oracle in extra_oracles:
        bad = None
        for n in range(2, top + 1):
            rep = verify_axioms(oracle, n)
            if not rep.ok:
                bad = f"n={n}: {rep.counterexample}"
                break
        out.append(CheckResult(f"axioms[{oracle.spec()}]", bad is None, bad or f"n<={top}"))
    return out


def check_families() -> List[CheckResult]:
    out = []
    cases = [(mst_example1, "mst_example1", k) for k in (2, 3, 4)]
    cases += [(abc_example2, "abc_example2", 2)]
    cases += [(tsp_lower, "tsp_lower", k) for k in (4, 5)]
    cases += [(planar_lower, "planar_lower", k) for k in (3, 4)]
    for make, name, k in cases:
        inst, prof, sys, policy = make(k)
        greedy_w, opt_w = closed_form(name, k)
        got = inst.total(ordinal_greedy(prof, sys, policy).solution)
        opt = brute_force_opt(inst, sys).total_weight if inst.n <= MAX_BRUTE_N else opt_w
        ok = got == greedy_w and opt == opt_w
        out.append(CheckResult(f"family[{name}, {k}]", ok, f"greedy {got} vs {greedy_w}, opt {opt} vs {opt_w}",
                               None if ok else make(k)))
    b = matching_tight()
    runs = enumerate_greedy_runs(b.profile, b.constraints).weighted(b.instance)
    worst = min(s.total_weight for s in runs)
    opt = brute_force_opt(b.instance, b.constraints).total_weight
    ok = (worst, opt) == (1, 2)
    out.append(CheckResult("family[matching_tight]", ok, f"worst {worst}, opt {opt}", None if ok else b))
    return out


@dataclass
class VerifyReport:
    results: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> List[str]:
        out = []
        for r in self.results:
            out.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}" + (f": {r.detail}" if r.detail else ""))
            if r.warning:
                out.append(f"WARNING {r.name}: {r.warning}")
        return out


def run_verify(trials: int = 200, max_n: int = 7, seed: int = 0, families: bool = True,
               extra_oracles: Iterable[AttachmentOracle] = (), specs: Sequence[str] = SWEEP_SPECS) -> VerifyReport:
    """Axioms, family closed forms, random ratio/stability/reduction sweeps and oracle agreement."""
    if trials < 0:
        raise ArgumentError("trials must be non-negative")
    if not 3 <= max_n <= MAX_BRUTE_N:
        raise ArgumentError(f"max-n must lie in [3, {MAX_BRUTE_N}]")
    results = check_axioms(extra_oracles, max_n=max_n)
    if families:
        results += check_families()
    if trials == 0:
        msg = "no random trials requested; random sweeps pass vacuously"
        warnings.warn(msg)
        results.append(CheckResult("random", True, "0 trials", warning=msg))
        return VerifyReport(results)

    jobs = []
    for t in range(trials):
        n = 3 + t % (max_n - 2)
        for spec in specs:
            if spec_for(spec, n) is not None:
                jobs.append((seed + t, spec, n, n <= 6))
    by_spec: Dict[str, List[str]] = {s: [] for s in specs}
    first_bad: Dict[str, InstanceBundle] = {}
    counts = {s: [0, 0] for s in specs}
    for s_seed, spec, n, outcome in pmap(_random_job, jobs):
        counts[spec][0] += 1
        counts[spec][1] += outcome.solutions
        if outcome.failures:
            by_spec[spec].extend(f"seed={s_seed} n={n}: {f}" for f in outcome.failures)
            first_bad.setdefault(spec, random_instance(n, seed=s_seed, constraints=spec))
    for spec in specs:
        fails = by_spec[spec]
        detail = fails[0] if fails else f"{counts[spec][0]} instances, {counts[spec][1]} runs"
        results.append(CheckResult(f"random[{spec}]", not fails, detail, first_bad.get(spec)))

    agree_jobs = [(seed + t, 2 + t % (max_n - 1)) for t in range(trials)]
    agree = [(j, f) for j, fs in zip(agree_jobs, pmap(_agreement_job, agree_jobs)) for f in fs]
    if agree:
        (s_seed, n), msg = agree[0]
        results.append(CheckResult("oracle_agreement", False, f"seed={s_seed} n={n}: {msg}",
                                   random_instance(n, seed=s_seed, constraints=MST_SPEC)))
    else:
        results.append(CheckResult("oracle_agreement", True, f"{trials} instances"))
    return VerifyReport(results)


FAMILY_BOUNDS = {
    "mst_example1": Fraction(2),
    "abc_example2": None,        # b + 1 = c
    "tsp_lower": Fraction(2),
    "planar_lower": Fraction(4),
}


@dataclass(frozen=True)
class SweepRow:
    family: str
    size: int
    n: int
    greedy: Fraction
    optimal: Fraction
    ratio: Fraction
    bound: Fraction
    executed: bool


def sweep_family(family: str, sizes: Sequence[int] = (4, 8, 16, 32), eps=None,
                 run_greedy_up_to: int = 400) -> List[SweepRow]:
    """Adversarial greedy weight against the closed-form optimum for growing sizes.

    Greedy is actually run while the instance has at most ``run_greedy_up_to``
    nodes and must reproduce the closed form; beyond that the closed form is
    reported directly.
    """
    makers = {"mst_example1": mst_example1, "abc_example2": abc_example2,
              "tsp_lower": tsp_lower, "planar_lower": planar_lower}
    if family not in makers:
        raise ArgumentError(f"no sweep for {family!r}; choose from {sorted(makers)}")
    rows = []
    for k in sizes:
        kw = {} if eps is None else {"eps": eps}
        g, o = closed_form(family, k, **kw)
        n = _family_n(family, k)
        executed = n <= run_greedy_up_to
        if executed:
            inst, prof, sys, policy = makers[family](k, **kw)
            got = inst.total(ordinal_greedy(prof, sys, policy).solution)
            if got != g:
                raise InvariantViolation(f"{family}({k}) greedy weight {got} differs from closed form {g}")
        bound = FAMILY_BOUNDS[family] if FAMILY_BOUNDS[family] is not None else Fraction(k)
        rows.append(SweepRow(family, k, n, g, o, o / g, bound, executed))
    return rows


def _family_n(family: str, k: int) -> int:
    return {"mst_example1": 2 * k, "abc_example2": k * k, "tsp_lower": 2 * k - 3,
            "planar_lower": 2 * k}[family]


def is_monotone(rows: Sequence[SweepRow]) -> bool:
    rs = [r.ratio for r in rows]
    return all(a <= b for a, b in zip(rs, rs[1:])) and all(r.ratio <= r.bound for r in rows)
