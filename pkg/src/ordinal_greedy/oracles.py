"""Exact reference solvers and the binary-weight reduction.

All solvers work on integer-scaled copies of the rational weights and report
results back as exact fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from .constraints import ConstraintSystem, EliminationCause
from .graph_core import (
    ArgumentError, Edge, EdgeSet, PreferenceProfile, WeightedInstance, all_edges, build_partial_order,
    check_consistency, edge,
)
from .greedy import GreedyTrace, Solution, validate_trace

MAX_BRUTE_N = 8
MAX_HELD_KARP_N = 16
MAX_SPARSITY_NODES = 16


class InvariantViolation(AssertionError):
    """An inequality the reduction relies on failed; indicates a bug, never expected."""


def ratio(opt: Fraction, sol: Fraction):
    """``opt / sol`` with 0/0 read as 1 and x/0 as infinity."""
    if sol == 0:
        return Fraction(1) if opt == 0 else math.inf
    return Fraction(opt) / Fraction(sol)


def brute_force_opt(inst: WeightedInstance, sys: ConstraintSystem) -> Solution:
    """Maximum-weight feasible edge set by branch and bound.

    Edges are branched on in order of decreasing weight (ties by index),
    include before exclude; the first optimum met is kept, so the result is
    reproducible.
    """
    n = inst.n
    if n > MAX_BRUTE_N:
        raise ArgumentError(f"brute force is limited to n <= {MAX_BRUTE_N}")
    if n != sys.n:
        raise ArgumentError("instance and constraints disagree on n")
    iw, _ = inst.scaled()
    order = sorted(all_edges(n), key=lambda e: (-iw[e], e))
    ws = [iw[e] for e in order]
    m = len(order)
    prefix = [0]
    for x in ws:
        prefix.append(prefix[-1] + x)
    cap = sys.max_edges()
    current = EdgeSet(n)
    best_w = -1
    best: Tuple[Edge, ...] = ()

    def dfs(i: int, cur: int):
        nonlocal best_w, best
        if cur > best_w:
            best_w, best = cur, tuple(current.order)
        room = cap - len(current.edges)
        if i == m or room <= 0:
            return
        if cur + prefix[min(i + room, m)] - prefix[i] <= best_w:
            return
        e = order[i]
        if sys.cause(current, e) is EliminationCause.ADDED:
            current.add(e)
            dfs(i + 1, cur + ws[i])
            current.pop()
        dfs(i + 1, cur)

    dfs(0, 0)
    return Solution.of(best, inst)


def kruskal_mst(inst: WeightedInstance) -> Solution:
    """Maximum-weight spanning tree (greedy by decreasing weight, union-find)."""
    forest = EdgeSet(inst.n)
    for e in sorted(all_edges(inst.n), key=lambda e: (-inst.weights[e], e)):
        if not forest.connected(*e):
            forest.add(e)
    return Solution.of(forest.edges, inst)


def held_karp_max_tsp(inst: WeightedInstance) -> Solution:
    """Maximum-weight Hamiltonian cycle by subset dynamic programming."""
    n = inst.n
    if not 3 <= n <= MAX_HELD_KARP_N:
        raise ArgumentError(f"Held-Karp needs 3 <= n <= {MAX_HELD_KARP_N}, got {n}")
    iw, _ = inst.scaled()
    w = [[0] * n for _ in range(n)]
    for (i, j), x in iw.items():
        w[i][j] = w[j][i] = x
    # paths start at node 0; mask covers nodes 1..n-1 (bit k-1 for node k)
    full = 1 << (n - 1)
    neg = -1
    dp = [[neg] * n for _ in range(full)]
    parent = [[0] * n for _ in range(full)]
    for k in range(1, n):
        dp[1 << (k - 1)][k] = w[0][k]
    for mask in range(1, full):
        row = dp[mask]
        for j in range(1, n):
            val = row[j]
            if val < 0 or not mask >> (j - 1) & 1:
                continue
            wj = w[j]
            for k in range(1, n):
                bit = 1 << (k - 1)
                if mask & bit:
                    continue
                cand = val + wj[k]
                nm = mask | bit
                if cand > dp[nm][k]:
                    dp[nm][k] = cand
                    parent[nm][k] = j
    last = full - 1
    end = max(range(1, n), key=lambda j: (dp[last][j] + w[j][0], -j))
    tour = [end]
    mask = last
    while True:
        j = tour[-1]
        p = parent[mask][j]
        mask ^= 1 << (j - 1)
        if not mask:
            break
        tour.append(p)
    tour.append(0)
    edges = [edge(tour[i], tour[(i + 1) % n]) for i in range(n)]
    return Solution.of(edges, inst)


@dataclass(frozen=True)
class SparsityResult:
    d: Fraction
    witness_nodes: FrozenSet[int]
    witness_edges: FrozenSet[Edge]


def sparsity(edges: Iterable[Edge]) -> SparsityResult:
    """Maximum of |E(F)|/|V(F)| over node-induced subgraphs (ties: more nodes, then lexicographic)."""
    es = sorted({edge(*e) for e in edges})
    nodes = sorted({x for e in es for x in e})
    if not es:
        return SparsityResult(Fraction(0), frozenset(), frozenset())
    if len(nodes) > MAX_SPARSITY_NODES:
        raise ArgumentError(f"exhaustive sparsity is limited to {MAX_SPARSITY_NODES} nodes")
    pos = {x: i for i, x in enumerate(nodes)}
    k = len(nodes)
    adj = [0] * k
    for u, v in es:
        adj[pos[u]] |= 1 << pos[v]
        adj[pos[v]] |= 1 << pos[u]
    count = [0] * (1 << k)
    best = (Fraction(0), 0, 0)
    for mask in range(1, 1 << k):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        count[mask] = count[rest] + bin(adj[low] & rest).count("1")
        size = bin(mask).count("1")
        cand = (Fraction(count[mask], size), size, -mask)
        if cand > best:
            best = cand
    mask = -best[2]
    chosen = frozenset(nodes[i] for i in range(k) if mask >> i & 1)
    induced = frozenset(e for e in es if e[0] in chosen and e[1] in chosen)
    return SparsityResult(best[0], chosen, induced)


def assign_opt_edges(opt: Iterable[Edge], d) -> Dict[Edge, Dict[int, Fraction]]:
    """Split each edge between its endpoints so no node carries more than ``d``.

    Solved as an integral flow after scaling ``d = p/q`` by ``q``: every edge
    supplies ``q`` units, every node accepts ``p``.  Lower-degree endpoints
    are preferred through a min-cost objective.
    """
    es = sorted({edge(*e) for e in opt})
    d = Fraction(d)
    sp = sparsity(es)
    if sp.d > d:
        raise ArgumentError(f"edge set has sparsity {sp.d} > {d}; no assignment exists")
    if not es:
        return {}
    p, q = d.numerator, d.denominator
    deg: Dict[int, int] = {}
    for u, v in es:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    g = nx.DiGraph()
    for e in es:
        g.add_edge("s", ("e", e), capacity=q, weight=0)
        for x in e:
            g.add_edge(("e", e), ("v", x), capacity=q, weight=deg[x])
    for x in deg:
        g.add_edge(("v", x), "t", capacity=p, weight=0)
    flow = nx.max_flow_min_cost(g, "s", "t")
    if sum(flow["s"].values()) != q * len(es):
        raise InvariantViolation("Hall condition failed although the sparsity bound holds")
    out = {}
    for e in es:
        out[e] = {x: Fraction(flow[("e", e)][("v", x)], q) for x in e}
    return out


@dataclass(frozen=True)
class BinaryReduction:
    """0/1 weights under which the same greedy solution is at least as bad."""

    wbar: WeightedInstance
    assignment: Dict[Edge, Edge]
    k: int
    r: Tuple[int, ...]
    delta: object
    unbounded: bool
    solution_order: Tuple[Edge, ...]
    new_ratio: object


def binary_reduce(inst: WeightedInstance, prof: PreferenceProfile, trace: GreedyTrace,
                  sys: ConstraintSystem, opt: Optional[Solution] = None) -> BinaryReduction:
    """Build 0/1 weights, consistent with ``prof``, with ratio at least the original one.

    Two branches.  If some non-solution edge has no solution edge known to
    dominate it, that edge and its dominators get weight 1 and the greedy
    solution scores 0.  Otherwise every non-solution edge is raised to its
    lightest dominating solution edge, edges are grouped by that edge (equal
    weight runs collapse onto the last of the run), and the shortest prefix
    s_1..s_k of the solution whose groups hold at least ``delta * k``
    optimum edges gets weight 1.
    """
    if trace.n != prof.n or inst.n != prof.n or sys.n != prof.n:
        raise ArgumentError("instance, profile, trace and constraints must share n")
    validate_trace(trace, prof, sys)
    if opt is None:
        opt = brute_force_opt(inst, sys)
    S = trace.solution
    w = inst.weights
    w_s, w_opt = inst.total(S), opt.total_weight
    delta = ratio(w_opt, w_s)
    po = build_partial_order(prof)
    edges = all_edges(inst.n)
    s_dominators = {e: [s for s in S if po.dominates(s, e)] for e in edges}

    orphan = next((e for e in edges if e not in S and not s_dominators[e]), None)
    if orphan is not None:
        ones = set(po.dominators(orphan))
        wbar = WeightedInstance(inst.n, {e: Fraction(int(e in ones)) for e in edges})
        reduction = BinaryReduction(wbar, {}, 0, (), delta, True, (), math.inf)
        _check_reduction(reduction, inst, prof, sys, S, opt_wbar=brute_force_opt(wbar, sys))
        return reduction
    if w_s == 0:
        if w_opt > 0:
            raise InvariantViolation("zero-weight solution but every edge is dominated by it")
        wbar = WeightedInstance(inst.n, {e: Fraction(0) for e in edges})
        return BinaryReduction(wbar, {}, 0, (), delta, False, (), Fraction(1))

    order = tuple(sorted(S, key=lambda e: (-w[e], e)))
    m = len(order)
    run_end = {}
    for i, s in enumerate(order):
        run_end[w[s]] = i
    what = {}
    assignment = {}
    for e in edges:
        if e in S:
            level = w[e]
        else:
            level = min(w[s] for s in s_dominators[e])
        what[e] = level
        assignment[e] = order[run_end[level]]
    index = {s: i for i, s in enumerate(order)}
    r = [0] * m
    for e in opt.edges:
        r[index[assignment[e]]] += 1

    lhs = sum((r[i] * w[order[i]] for i in range(m)), Fraction(0))
    rhs = delta * sum((w[s] for s in order), Fraction(0))
    if lhs < rhs:
        raise InvariantViolation(f"sum r_i w(s_i) = {lhs} < delta * w(S) = {rhs}")
    k = None
    acc = 0
    for i in range(m):
        acc += r[i]
        if acc >= delta * (i + 1):
            k = i + 1
            break
    if k is None:
        raise InvariantViolation("no prefix of the solution carries delta times its size")
    heavy = set(order[:k])
    wbar = WeightedInstance(inst.n, {e: Fraction(int(assignment[e] in heavy)) for e in edges})
    opt_wbar = brute_force_opt(wbar, sys)
    reduction = BinaryReduction(wbar, assignment, k, tuple(r), delta, False, order,
                                ratio(opt_wbar.total_weight, wbar.total(S)))
    _check_reduction(reduction, inst, prof, sys, S, opt_wbar)
    return reduction


def _check_reduction(red: BinaryReduction, inst, prof, sys, S, opt_wbar: Solution) -> None:
    if any(x not in (0, 1) for x in red.wbar.weights.values()):
        raise InvariantViolation("reduced weights are not binary")
    if not check_consistency(red.wbar, prof):
        raise InvariantViolation("profile is inconsistent with the reduced weights")
    new = ratio(opt_wbar.total_weight, red.wbar.total(S))
    if red.unbounded and new != math.inf:
        raise InvariantViolation("unbounded branch left the greedy solution with positive weight")
    if new < red.delta:
        raise InvariantViolation(f"reduced ratio {new} is below the original {red.delta}")
