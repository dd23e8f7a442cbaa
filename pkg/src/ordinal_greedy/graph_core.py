"""Complete weighted graphs, ordinal preference profiles and edge dominance.

Nodes are the integers ``0..n-1`` and an edge is always the sorted pair
``(i, j)`` with ``i < j``.  Weights are :class:`fractions.Fraction` so that
tiny perturbations (the ``eps`` of the adversarial families) compare exactly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

Edge = Tuple[int, int]


class ArgumentError(ValueError):
    """Raised when an operation is called with arguments outside its contract."""


def edge(i: int, j: int) -> Edge:
    if i == j:
        raise ArgumentError(f"self-loop ({i}, {j}) is not an edge")
    return (i, j) if i < j else (j, i)


def all_edges(n: int) -> List[Edge]:
    return list(combinations(range(n), 2))


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, eq=True)
class WeightedInstance:
    """Complete symmetric graph on ``n`` nodes with exact non-negative weights."""

    n: int
    weights: Mapping[Edge, Fraction] = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError("an instance needs at least one node")
        clean: Dict[Edge, Fraction] = {}
        for (i, j), w in self.weights.items():
            if i == j:
                raise ArgumentError(f"self-loop ({i}, {j}) in weights")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ArgumentError(f"edge ({i}, {j}) outside 0..{self.n - 1}")
            e = edge(i, j)
            w = as_fraction(w)
            if w < 0:
                raise ArgumentError(f"negative weight {w} on {e}")
            if e in clean and clean[e] != w:
                raise ArgumentError(f"asymmetric weights given for {e}")
            clean[e] = w
        missing = [e for e in all_edges(self.n) if e not in clean]
        if missing:
            raise ArgumentError(f"missing weights for pairs {missing}")
        object.__setattr__(self, "weights", clean)

    @classmethod
    def from_dict(cls, n: int, weights: Mapping[Edge, object], default=0) -> "WeightedInstance":
        """Build an instance where unlisted pairs get ``default``."""
        full = {e: as_fraction(default) for e in all_edges(n)}
        for (i, j), w in weights.items():
            full[edge(i, j)] = as_fraction(w)
        return cls(n, full)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[object]]) -> "WeightedInstance":
        n = len(matrix)
        weights = {}
        for i, j in all_edges(n):
            a, b = as_fraction(matrix[i][j]), as_fraction(matrix[j][i])
            if a != b:
                raise ArgumentError(f"matrix is not symmetric at ({i}, {j})")
            weights[(i, j)] = a
        return cls(n, weights)

    def w(self, i: int, j: int) -> Fraction:
        return self.weights[edge(i, j)]

    def total(self, edges: Iterable[Edge]) -> Fraction:
        return sum((self.weights[e] for e in edges), Fraction(0))

    def scaled(self) -> Tuple[Dict[Edge, int], int]:
        """Integer weights ``w * scale`` with ``scale`` the lcm of all denominators."""
        scale = 1
        for w in self.weights.values():
            scale = scale * w.denominator // _gcd(scale, w.denominator)
        return {e: int(w * scale) for e, w in self.weights.items()}, scale


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass(frozen=True)
class PreferenceProfile:
    """Strict rankings: ``prefs[x]`` lists every other node, most preferred first."""

    prefs: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        prefs = tuple(tuple(p) for p in self.prefs)
        n = len(prefs)
        for x, p in enumerate(prefs):
            if sorted(p) != [y for y in range(n) if y != x]:
                raise ArgumentError(f"ranking of node {x} must list every other node exactly once: {p}")
        object.__setattr__(self, "prefs", prefs)
        rank = [[-1] * n for _ in range(n)]
        for x, p in enumerate(prefs):
            for r, y in enumerate(p):
                rank[x][y] = r
        object.__setattr__(self, "_rank", rank)

    @property
    def n(self) -> int:
        return len(self.prefs)

    def rank(self, x: int, y: int) -> int:
        """Position of ``y`` in ``x``'s list (0 = first choice)."""
        return self._rank[x][y]

    def prefers(self, x: int, y: int, z: int) -> bool:
        return self._rank[x][y] < self._rank[x][z]


TieBreak = Union[str, Sequence[int], Callable[[int, int], object]]


def _tie_key(tie_break: TieBreak, n: int) -> Callable[[int, int], object]:
    if callable(tie_break):
        return tie_break
    if tie_break == "ascending":
        return lambda x, y: y
    if tie_break == "descending":
        return lambda x, y: -y
    if isinstance(tie_break, str):
        raise ArgumentError(f"unknown tie-break rule {tie_break!r}")
    order = list(tie_break)
    if sorted(order) != list(range(n)):
        raise ArgumentError("a tie-break priority must be a permutation of the nodes")
    position = {node: i for i, node in enumerate(order)}
    return lambda x, y: position[y]


def profile_from_weights(inst: WeightedInstance, tie_break: TieBreak = "ascending") -> PreferenceProfile:
    """Rank each node's neighbours by decreasing weight.

    Equal weights are ordered by ``tie_break``: ``"ascending"`` or
    ``"descending"`` node index, a node permutation used as a global
    priority list, or a callable ``key(x, y)`` (smaller key ranks first).
    """
    key = _tie_key(tie_break, inst.n)
    prefs = []
    for x in range(inst.n):
        others = [y for y in range(inst.n) if y != x]
        others.sort(key=lambda y: (-inst.w(x, y), key(x, y)))
        prefs.append(tuple(others))
    return PreferenceProfile(tuple(prefs))


def check_consistency(inst: WeightedInstance, prof: PreferenceProfile) -> bool:
    """True iff whenever x prefers y to z, w(x, y) >= w(x, z)."""
    if inst.n != prof.n:
        raise ArgumentError(f"instance has {inst.n} nodes but profile has {prof.n}")
    for x, p in enumerate(prof.prefs):
        # adjacent positions suffice: the ranking is a chain
        for y, z in zip(p, p[1:]):
            if inst.w(x, y) < inst.w(x, z):
                return False
    return True


class Relation(enum.Enum):
    EQUAL = "equal-by-cycle"
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    INCOMPARABLE = "incomparable"


class PartialOrder:
    """Reflexive-transitive dominance relation over the edges of ``K_n``.

    ``dominates(a, b)`` means every consistent weight function has
    ``w(a) >= w(b)``.  Edges that dominate each other are forced equal.
    """

    def __init__(self, n: int, reach: Dict[Edge, int], index: Dict[Edge, int]):
        self.n = n
        self._reach = reach
        self._index = index
        self._edges = sorted(index, key=index.get)

    def dominates(self, a: Edge, b: Edge) -> bool:
        return bool(self._reach[edge(*a)] >> self._index[edge(*b)] & 1)

    def compare(self, a: Edge, b: Edge) -> Relation:
        ab, ba = self.dominates(a, b), self.dominates(b, a)
        if ab and ba:
            return Relation.EQUAL
        if ab:
            return Relation.DOMINATES
        if ba:
            return Relation.DOMINATED
        return Relation.INCOMPARABLE

    def dominated_by(self, a: Edge) -> List[Edge]:
        """Edges that ``a`` dominates (including ``a``)."""
        bits = self._reach[edge(*a)]
        return [e for e in self._edges if bits >> self._index[e] & 1]

    def dominators(self, b: Edge) -> List[Edge]:
        """Edges that dominate ``b`` (including ``b``)."""
        k = self._index[edge(*b)]
        return [e for e in self._edges if self._reach[e] >> k & 1]


def build_partial_order(prof: PreferenceProfile) -> PartialOrder:
    n = prof.n
    edges = all_edges(n)
    index = {e: i for i, e in enumerate(edges)}
    g = nx.DiGraph()
    g.add_nodes_from(edges)
    for x, p in enumerate(prof.prefs):
        for y, z in zip(p, p[1:]):
            g.add_edge(edge(x, y), edge(x, z))
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    comp_bits = {}
    for c in reversed(list(nx.topological_sort(cond))):
        bits = 0
        for e in cond.nodes[c]["members"]:
            bits |= 1 << index[e]
        for succ in cond.successors(c):
            bits |= comp_bits[succ]
        comp_bits[c] = bits
    reach = {e: comp_bits[members[e]] for e in edges}
    return PartialOrder(n, reach, index)


def first_choice_cycles(top: Mapping[int, int]) -> List[List[int]]:
    """Cycles of the functional graph ``x -> top[x]``."""
    state: Dict[int, int] = {}
    cycles = []
    for start in sorted(top):
        if start in state:
            continue
        path = []
        x = start
        while x not in state:
            state[x] = 1
            path.append(x)
            x = top[x]
        if state[x] == 1:
            cycles.append(path[path.index(x):])
        for y in path:
            state[y] = 2
    return cycles


def known_undominated(available: Iterable[Edge], prof: PreferenceProfile) -> List[Edge]:
    """Edges of ``available`` that are undominated under every consistent weighting.

    These are mutual first choices and the edges of first-choice cycles once
    every ranking is restricted to the available edges.  Sorted ascending.
    """
    avail = {edge(*e) for e in available}
    if not avail:
        raise ArgumentError("available edge set is empty")
    nbrs: Dict[int, set] = {}
    for i, j in avail:
        nbrs.setdefault(i, set()).add(j)
        nbrs.setdefault(j, set()).add(i)
    top = {}
    for x, ys in nbrs.items():
        top[x] = next(y for y in prof.prefs[x] if y in ys)
    out = set()
    for cyc in first_choice_cycles(top):
        for k, x in enumerate(cyc):
            out.add(edge(x, cyc[(k + 1) % len(cyc)]))
    return sorted(out)


class EdgeSet:
    """Mutable edge subset of ``K_n`` with degree and component bookkeeping.

    Components use union-find by size without path compression, so the most
    recent :meth:`add` can be undone with :meth:`pop` (used by the
    depth-first searches).
    """

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        self.n = n
        self.edges: set = set()
        self.order: List[Edge] = []
        self.deg = [0] * n
        self.adj: List[set] = [set() for _ in range(n)]
        self._parent = list(range(n))
        self._members: List[List[int]] = [[x] for x in range(n)]
        self._undo: List[Optional[Tuple[int, int]]] = []
        for e in edges:
            self.add(e)

    def __contains__(self, e) -> bool:
        return edge(*e) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))

    def copy(self) -> "EdgeSet":
        return EdgeSet(self.n, self.order)

    def find(self, x: int) -> int:
        while self._parent[x] != x:
            x = self._parent[x]
        return x

    def connected(self, u: int, v: int) -> bool:
        return self.find(u) == self.find(v)

    def component_size(self, x: int) -> int:
        return len(self._members[self.find(x)])

    def component_nodes(self, x: int) -> List[int]:
        return self._members[self.find(x)]

    def components(self) -> List[List[int]]:
        return [sorted(self._members[r]) for r in range(self.n) if self._parent[r] == r]

    def add(self, e: Edge) -> None:
        u, v = e = edge(*e)
        if e in self.edges:
            raise ArgumentError(f"edge {e} already present")
        self.edges.add(e)
        self.order.append(e)
        self.deg[u] += 1
        self.deg[v] += 1
        self.adj[u].add(v)
        self.adj[v].add(u)
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            self._undo.append(None)
            return
        if len(self._members[ru]) < len(self._members[rv]):
            ru, rv = rv, ru
        self._parent[rv] = ru
        self._undo.append((ru, rv))
        self._members[ru].extend(self._members[rv])

    def pop(self) -> Edge:
        """Undo the most recent :meth:`add`."""
        e = self.order.pop()
        u, v = e
        self.edges.discard(e)
        self.deg[u] -= 1
        self.deg[v] -= 1
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        merged = self._undo.pop()
        if merged is not None:
            ru, rv = merged
            self._parent[rv] = rv
            del self._members[ru][len(self._members[ru]) - len(self._members[rv]):]
        return e

    def path(self, u: int, v: int) -> Optional[List[int]]:
        """Some u-v path as a node list, or None when disconnected."""
        if not self.connected(u, v):
            return None
        prev = {u: u}
        frontier = [u]
        while v not in prev:
            nxt = []
            for x in frontier:
                for y in self.adj[x]:
                    if y not in prev:
                        prev[y] = x
                        nxt.append(y)
            frontier = nxt
        out = [v]
        while out[-1] != u:
            out.append(prev[out[-1]])
        return out[::-1]
