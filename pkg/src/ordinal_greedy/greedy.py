"""Ordinal Greedy, the omniscient baseline, run enumeration and pairwise stability."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .constraints import ConstraintSystem, EliminationCause
from .graph_core import (
    ArgumentError, Edge, EdgeSet, PreferenceProfile, WeightedInstance, all_edges, edge,
    first_choice_cycles, known_undominated,
)

Chooser = Callable[[List[Edge], EdgeSet], Edge]


class ChoicePolicy:
    """Resolves which known-undominated edge to add when there are several."""

    test_only = False

    def chooser(self) -> Chooser:
        raise NotImplementedError


@dataclass(frozen=True)
class Lexicographic(ChoicePolicy):
    def chooser(self):
        return lambda candidates, current: candidates[0]


@dataclass(frozen=True)
class SeededRandom(ChoicePolicy):
    seed: int = 0

    def chooser(self):
        rng = random.Random(self.seed)
        return lambda candidates, current: rng.choice(candidates)


@dataclass(frozen=True)
class Adversarial(ChoicePolicy):
    """Follow a scripted edge sequence.

    Each step takes the earliest script edge that is currently a candidate;
    when none is, the lexicographically smallest candidate is taken.
    """

    script: Tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "script", tuple(edge(*e) for e in self.script))

    def chooser(self):
        order = {e: i for i, e in reversed(list(enumerate(self.script)))}

        def choose(candidates, current):
            scripted = [e for e in candidates if e in order]
            if scripted:
                return min(scripted, key=order.get)
            return candidates[0]
        return choose


@dataclass(frozen=True)
class MinTrueWeight(ChoicePolicy):
    """Test-only adversary that peeks at hidden weights to take the lightest candidate."""

    instance: WeightedInstance = field(repr=False, default=None)
    test_only = True

    def chooser(self):
        w = self.instance.weights
        return lambda candidates, current: min(candidates, key=lambda e: (w[e], e))


@dataclass(frozen=True)
class Step:
    iteration: int
    edge: Edge
    cause: EliminationCause

    def dump(self) -> str:
        return f"{self.iteration} {self.edge[0]}-{self.edge[1]} {self.cause.value}"


@dataclass(frozen=True)
class GreedyTrace:
    """Every edge of ``K_n`` once, at its critical iteration, with its cause."""

    n: int
    steps: Tuple[Step, ...]

    @property
    def solution(self) -> FrozenSet[Edge]:
        return frozenset(s.edge for s in self.steps if s.cause is EliminationCause.ADDED)

    @property
    def added(self) -> List[Edge]:
        """Solution edges in the order they were added."""
        return [s.edge for s in self.steps if s.cause is EliminationCause.ADDED]

    def critical_iteration(self, e: Edge) -> int:
        e = edge(*e)
        return next(s.iteration for s in self.steps if s.edge == e)

    def cause_of(self, e: Edge) -> EliminationCause:
        e = edge(*e)
        return next(s.cause for s in self.steps if s.edge == e)

    def dump(self) -> str:
        return "".join(s.dump() + "\n" for s in self.steps)

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None) -> "GreedyTrace":
        causes = {c.value: c for c in EliminationCause}
        steps = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                it, pair, cause = line.split()
                i, j = pair.split("-")
                steps.append(Step(int(it), edge(int(i), int(j)), causes[cause]))
            except (ValueError, KeyError):
                raise ArgumentError(f"line {lineno}: bad trace step {line!r}") from None
        if n is None:
            n = 1 + max((max(s.edge) for s in steps), default=0)
        return cls(n, tuple(steps))


@dataclass(frozen=True)
class Solution:
    edges: FrozenSet[Edge]
    total_weight: Optional[Fraction]
    degrees: Tuple[int, ...]

    @classmethod
    def of(cls, edges: Iterable[Edge], inst: Optional[WeightedInstance] = None,
           n: Optional[int] = None) -> "Solution":
        es = frozenset(edge(*e) for e in edges)
        n = inst.n if inst is not None else n
        deg = [0] * n
        for u, v in es:
            deg[u] += 1
            deg[v] += 1
        total = inst.total(es) if inst is not None else None
        return cls(es, total, tuple(deg))


def _sweep(sys: ConstraintSystem, current: EdgeSet, candidates: Iterable[Edge]) -> List[Tuple[Edge, EliminationCause]]:
    out = []
    for f in sorted(candidates):
        cause = sys.cause(current, f)
        if cause is not EliminationCause.ADDED:
            out.append((f, cause))
    return out


def _affected(sys: ConstraintSystem, current: EdgeSet, e: Edge, avail_adj: List[set]) -> Set[Edge]:
    """Available edges whose feasibility can change after adding ``e``."""
    u, v = e
    out = {edge(u, y) for y in avail_adj[u]} | {edge(v, y) for y in avail_adj[v]}
    comp = current.component_nodes(u)
    if sys.c < sys.n:
        for x in comp:
            out.update(edge(x, y) for y in avail_adj[x])
    else:
        inside = set(comp)
        for x in comp:
            out.update(edge(x, y) for y in avail_adj[x] if y in inside)
    return out


def ordinal_greedy(prof: PreferenceProfile, sys: ConstraintSystem,
                   policy: Optional[ChoicePolicy] = None) -> GreedyTrace:
    """Run Ordinal Greedy on the profile alone.

    Repeatedly add a known-undominated available edge (chosen by ``policy``)
    and drop every available edge that can no longer be added.
    """
    if prof.n != sys.n:
        raise ArgumentError(f"profile has {prof.n} nodes, constraints expect {sys.n}")
    n = prof.n
    choose = (policy or Lexicographic()).chooser()
    current = EdgeSet(n)
    avail_adj = [set(range(n)) - {x} for x in range(n)]
    n_avail = n * (n - 1) // 2
    ptr = [0] * n
    steps: List[Step] = []
    it = 0

    def drop(f):
        avail_adj[f[0]].discard(f[1])
        avail_adj[f[1]].discard(f[0])

    while n_avail:
        top = {}
        for x in range(n):
            if not avail_adj[x]:
                continue
            p = prof.prefs[x]
            while p[ptr[x]] not in avail_adj[x]:
                ptr[x] += 1
            top[x] = p[ptr[x]]
        candidates = sorted({edge(x, cyc[(k + 1) % len(cyc)])
                             for cyc in first_choice_cycles(top) for k, x in enumerate(cyc)})
        e = choose(candidates, current)
        if e not in candidates:
            raise ArgumentError(f"policy picked {e}, which is not known to be undominated")
        it += 1
        current.add(e)
        drop(e)
        n_avail -= 1
        steps.append(Step(it, e, EliminationCause.ADDED))
        if sys.attachment.local:
            affected = _affected(sys, current, e, avail_adj)
        else:
            affected = {edge(x, y) for x in range(n) for y in avail_adj[x] if x < y}
        for f, cause in _sweep(sys, current, affected):
            drop(f)
            n_avail -= 1
            steps.append(Step(it, f, cause))
    return GreedyTrace(n, tuple(steps))


def omniscient_greedy(inst: WeightedInstance, sys: ConstraintSystem,
                      tie_break: Union[str, Callable[[Edge], object]] = "lex") -> GreedyTrace:
    """Classic greedy by non-increasing true weight.

    Step ``t`` of the trace is the ``t``-th edge in that order; edges tied on
    weight are taken lexicographically unless ``tie_break`` is a key function.
    """
    if inst.n != sys.n:
        raise ArgumentError("instance and constraints disagree on n")
    key = (lambda e: e) if tie_break == "lex" else tie_break
    order = sorted(all_edges(inst.n), key=lambda e: (-inst.weights[e], key(e)))
    current = EdgeSet(inst.n)
    steps = []
    for t, e in enumerate(order, 1):
        cause = sys.cause(current, e)
        if cause is EliminationCause.ADDED:
            current.add(e)
        steps.append(Step(t, e, cause))
    return GreedyTrace(inst.n, tuple(steps))


def validate_trace(trace: GreedyTrace, prof: PreferenceProfile, sys: ConstraintSystem) -> None:
    """Replay ``trace`` and raise :class:`ArgumentError` unless Ordinal Greedy could have produced it.

    Checks that every edge appears once, each iteration adds exactly one
    known-undominated edge, and the recorded eliminations and causes are
    exactly those forced by that addition.
    """
    if trace.n != prof.n or sys.n != prof.n:
        raise ArgumentError("trace, profile and constraints must share n")
    if sorted(s.edge for s in trace.steps) != all_edges(prof.n):
        raise ArgumentError("trace must list every edge exactly once")
    available = set(all_edges(prof.n))
    current = EdgeSet(prof.n)
    groups: Dict[int, List[Step]] = {}
    for s in trace.steps:
        groups.setdefault(s.iteration, []).append(s)
    for it in sorted(groups):
        added = [s.edge for s in groups[it] if s.cause is EliminationCause.ADDED]
        if len(added) != 1:
            raise ArgumentError(f"iteration {it} must add exactly one edge")
        e = added[0]
        if e not in known_undominated(available, prof):
            raise ArgumentError(f"edge {e} was not known-undominated at iteration {it}")
        current.add(e)
        available.discard(e)
        dead = dict(_sweep(sys, current, available))
        recorded = {s.edge: s.cause for s in groups[it] if s.cause is not EliminationCause.ADDED}
        if recorded != dead:
            raise ArgumentError(f"eliminations recorded at iteration {it} do not match the profile")
        available -= set(dead)


@dataclass(frozen=True)
class GreedyRuns:
    """Distinct final edge sets reachable by Ordinal Greedy."""

    solutions: FrozenSet[FrozenSet[Edge]]
    complete: bool
    states: int

    def __iter__(self):
        return iter(sorted(self.solutions, key=sorted))

    def __len__(self):
        return len(self.solutions)

    def __contains__(self, item):
        return frozenset(edge(*e) for e in item) in self.solutions

    def weighted(self, inst: WeightedInstance) -> List[Solution]:
        return [Solution.of(s, inst) for s in self]


def enumerate_greedy_runs(prof: PreferenceProfile, sys: ConstraintSystem, cap: int = 200_000) -> GreedyRuns:
    """Explore every choice of known-undominated edge at every iteration.

    The remaining available set is a function of the current solution
    (heredity), so states are memoised on the solution alone.  ``cap`` bounds
    the number of states visited; when hit, ``complete`` is False.
    """
    if prof.n != sys.n:
        raise ArgumentError(f"profile has {prof.n} nodes, constraints expect {sys.n}")
    current = EdgeSet(prof.n)
    seen: Set[FrozenSet[Edge]] = set()
    found: Set[FrozenSet[Edge]] = set()
    complete = True

    def explore(available: FrozenSet[Edge]):
        nonlocal complete
        key = frozenset(current.edges)
        if key in seen:
            return
        if len(seen) >= cap:
            complete = False
            return
        seen.add(key)
        if not available:
            found.add(key)
            return
        for e in known_undominated(available, prof):
            current.add(e)
            rest = available - {e}
            dead = {f for f, _ in _sweep(sys, current, rest)}
            explore(rest - dead)
            current.pop()

    explore(frozenset(all_edges(prof.n)))
    return GreedyRuns(frozenset(found), complete, len(seen))


@dataclass(frozen=True)
class StabilityViolation:
    """A blocking pair: x and y both gain by dropping ``f_x``/``f_y`` and linking."""

    x: int
    y: int
    f_x: Tuple[Edge, ...]
    f_y: Tuple[Edge, ...]

    def __bool__(self):
        return False


MAX_STABILITY_B = 6


def _maximal_light_subsets(incident: List[Edge], w: Dict[Edge, Fraction], limit: Fraction) -> List[Tuple[Edge, ...]]:
    """Inclusion-maximal subsets with total weight strictly below ``limit``."""
    light = [s for s in chain.from_iterable(combinations(incident, r) for r in range(len(incident) + 1))
             if sum((w[e] for e in s), Fraction(0)) < limit]
    sets = [frozenset(s) for s in light]
    return [s for s, fs in zip(light, sets) if not any(fs < other for other in sets)]


def check_pairwise_stability(inst: WeightedInstance, sys: ConstraintSystem,
                             sol: Union[Solution, Iterable[Edge]]):
    """``True`` when no pair can profitably drop edges and link; else a :class:`StabilityViolation`.

    Feasibility is hereditary and weights are non-negative, so only the
    maximal subsets lighter than ``w(x, y)`` at each endpoint need checking.
    """
    edges = sol.edges if isinstance(sol, Solution) else frozenset(edge(*e) for e in sol)
    if sys.b > MAX_STABILITY_B:
        raise ArgumentError(f"stability check enumerates subsets; refusing b={sys.b} > {MAX_STABILITY_B}")
    if not sys.is_feasible(edges):
        raise ArgumentError("solution is infeasible")
    w = inst.weights
    for x, y in all_edges(inst.n):
        if (x, y) in edges:
            continue
        limit = w[(x, y)]
        if limit == 0:
            continue
        at_x = sorted(e for e in edges if x in e)
        at_y = sorted(e for e in edges if y in e)
        for fx in _maximal_light_subsets(at_x, w, limit):
            for fy in _maximal_light_subsets(at_y, w, limit):
                rest = (edges - set(fx) - set(fy)) | {(x, y)}
                if sys.is_feasible(rest):
                    return StabilityViolation(x, y, fx, fy)
    return True
