"""ABC constraint systems: attachment set, degree bound ``b``, component bound ``c``."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from .graph_core import ArgumentError, Edge, EdgeSet, all_edges, edge


class EliminationCause(enum.Enum):
    ADDED = "ADD"
    VIOLATES_A = "ELIM_A"
    VIOLATES_B = "ELIM_B"
    VIOLATES_C = "ELIM_C"


class AttachmentOracle:
    """Membership test for an attachment set.

    Subclasses that are known to satisfy heredity and attachment set
    ``local = True``; the greedy engine then only re-checks edges inside the
    component that just changed.  ``allows`` may be overridden with an
    incremental test, it must agree with ``member``.
    """

    name = "custom"
    local = False

    def __init__(self, member: Optional[Callable[[FrozenSet[Edge], int], bool]] = None,
                 name: Optional[str] = None):
        if member is not None:
            self._member = member
        if name is not None:
            self.name = name

    def member(self, edges: Iterable[Edge], n: int) -> bool:
        return self._member(frozenset(edge(*e) for e in edges), n)

    def _member(self, edges: FrozenSet[Edge], n: int) -> bool:
        raise NotImplementedError

    def allows(self, current: EdgeSet, e: Edge) -> bool:
        """Whether ``current + e`` is a member, given that ``current`` is."""
        return self.member(current.edges | {e}, current.n)

    def spec(self) -> str:
        return self.name

    def __repr__(self):
        return f"{type(self).__name__}({self.spec()!r})"

    def __eq__(self, other):
        return isinstance(other, AttachmentOracle) and type(self) is type(other) and self.spec() == other.spec()

    def __hash__(self):
        return hash((type(self).__name__, self.spec()))


class AllSubgraphs(AttachmentOracle):
    name = "all"
    local = True

    def _member(self, edges, n):
        return True

    def allows(self, current, e):
        return True


class Acyclic(AttachmentOracle):
    name = "acyclic"
    local = True

    def _member(self, edges, n):
        es = EdgeSet(n)
        for u, v in edges:
            if es.connected(u, v):
                return False
            es.add((u, v))
        return True

    def allows(self, current, e):
        return not current.connected(*e)


class NoShortCycles(AttachmentOracle):
    """Subgraphs whose every cycle has length exactly ``n`` (forests or one Hamiltonian cycle)."""

    name = "tsp"
    local = True

    def __init__(self, n: Optional[int] = None):
        super().__init__()
        self.n = n

    def _check_n(self, n):
        if self.n is not None and n != self.n:
            raise ArgumentError(f"oracle built for n={self.n}, asked about n={n}")

    def _member(self, edges, n):
        self._check_n(n)
        if Acyclic()._member(edges, n):
            return True
        if len(edges) != n:
            return False
        deg = [0] * n
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        return all(d == 2 for d in deg) and len(EdgeSet(n, edges).components()) == 1

    def allows(self, current, e):
        self._check_n(current.n)
        u, v = e
        if not current.connected(u, v):
            return True
        # current is a forest; closing u-v yields a Hamiltonian cycle only if
        # current is a single path through all n nodes ending at u and v
        return (len(current.edges) == current.n - 1 and current.deg[u] <= 1 and current.deg[v] <= 1
                and max(current.deg) <= 2)


@lru_cache(maxsize=1 << 18)
def _planar_cached(edges: FrozenSet[Edge]) -> bool:
    g = nx.Graph(edges)
    return nx.check_planarity(g)[0]


def is_planar(edges: Iterable[Edge]) -> bool:
    """Planarity with cheap shortcuts before the full test."""
    es = set(edge(*e) for e in edges)
    # peel degree <= 1 nodes, they never affect planarity
    deg = {}
    for u, v in es:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    leaves = [x for x, d in deg.items() if d == 1]
    while leaves:
        x = leaves.pop()
        if deg.get(x) != 1:
            continue
        e = next(f for f in es if x in f)
        es.discard(e)
        del deg[x]
        y = e[0] if e[1] == x else e[1]
        deg[y] -= 1
        if deg[y] == 1:
            leaves.append(y)
        elif deg[y] == 0:
            del deg[y]
    nodes = len(deg)
    if len(es) <= 8 or nodes <= 4:
        return True
    if len(es) > 3 * nodes - 6:
        return False
    return _planar_cached(frozenset(es))


class Planar(AttachmentOracle):
    name = "planar"
    local = True

    def _member(self, edges, n):
        return is_planar(edges)

    def allows(self, current, e):
        u, v = e
        if not current.connected(u, v):
            return True
        comp = current.component_nodes(u)
        comp_edges = [(x, y) for x in comp for y in current.adj[x] if x < y]
        return is_planar(comp_edges + [edge(u, v)])


class PlanarBridged(Planar):
    """Planar subgraphs in which each listed edge lies on no cycle."""

    name = "planar_lower"
    local = True

    def __init__(self, forbidden: Iterable[Edge]):
        super().__init__()
        self.forbidden = frozenset(edge(*f) for f in forbidden)

    def spec(self):
        return "planar_lower:" + ",".join(f"{i}-{j}" for i, j in sorted(self.forbidden))

    def _member(self, edges, n):
        if not is_planar(edges):
            return False
        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from(edges)
        bridges = {edge(*b) for b in nx.bridges(g)}
        return all(f in bridges for f in self.forbidden if f in edges)

    def allows(self, current, e):
        u, v = e = edge(*e)
        if not current.connected(u, v):
            return True
        if e in self.forbidden:
            return False
        # every forbidden edge of current is a bridge, so it lies on the new
        # cycle iff it lies on an arbitrary u-v path
        p = current.path(u, v)
        if any(edge(a, b) in self.forbidden for a, b in zip(p, p[1:])):
            return False
        return super().allows(current, e)


_KINDS = {
    "all": AllSubgraphs, "all_subgraphs": AllSubgraphs,
    "acyclic": Acyclic,
    "planar": Planar,
    "tsp": NoShortCycles, "no_nonhamiltonian_cycle": NoShortCycles,
}


def builtin_attachment(kind: str, n: Optional[int] = None,
                       forbidden: Optional[Iterable[Edge]] = None) -> AttachmentOracle:
    if kind in ("planar_lower", "planar_bridged"):
        return PlanarBridged(forbidden or ())
    if kind not in _KINDS:
        raise ArgumentError(f"unknown attachment kind {kind!r}")
    cls = _KINDS[kind]
    return cls(n) if cls is NoShortCycles else cls()


@dataclass(frozen=True)
class ConstraintSystem:
    """Attachment set plus degree bound ``b`` and component-size bound ``c`` on ``n`` nodes."""

    attachment: AttachmentOracle
    b: int
    c: int
    n: int

    def __post_init__(self):
        if not 1 <= self.b < self.c <= self.n:
            raise ArgumentError(f"need 1 <= b < c <= n, got b={self.b}, c={self.c}, n={self.n}")
        if isinstance(self.attachment, NoShortCycles) and self.n <= 2:
            raise ArgumentError("the tour constraint needs at least 3 nodes")

    @classmethod
    def parse(cls, text: str, n: int) -> "ConstraintSystem":
        return parse_constraint_spec(text, n)

    def spec(self) -> str:
        b = "max" if self.b == self.c - 1 else str(self.b)
        c = "n" if self.c == self.n else str(self.c)
        return f"A={self.attachment.spec()} b={b} c={c}"

    def cause(self, current: EdgeSet, e: Edge) -> EliminationCause:
        """Unchecked classification used by the engines."""
        u, v = e
        if self.c < self.n and not current.connected(u, v):
            if current.component_size(u) + current.component_size(v) > self.c:
                return EliminationCause.VIOLATES_C
        if current.deg[u] >= self.b or current.deg[v] >= self.b:
            return EliminationCause.VIOLATES_B
        if not self.attachment.allows(current, e):
            return EliminationCause.VIOLATES_A
        return EliminationCause.ADDED

    def is_feasible(self, edges: Iterable[Edge]) -> bool:
        es = EdgeSet(self.n, (edge(*e) for e in edges))
        if max(es.deg, default=0) > self.b:
            return False
        if any(len(comp) > self.c for comp in es.components()):
            return False
        return self.attachment.member(es.edges, self.n)

    def max_edges(self) -> int:
        """Upper bound on the size of any feasible edge set."""
        n = self.n
        bound = min(n * (n - 1) // 2, n * self.b // 2)
        a = self.attachment
        if isinstance(a, Acyclic):
            bound = min(bound, n - 1)
        elif isinstance(a, NoShortCycles):
            bound = min(bound, n)
        elif isinstance(a, Planar) and n >= 3:
            bound = min(bound, 3 * n - 6)
        return bound


def classify_edge(sys: ConstraintSystem, current: EdgeSet, e: Edge) -> EliminationCause:
    """Cause recorded for ``e`` against the feasible set ``current``.

    Priority when several constraints fail is component size, then degree,
    then attachment.
    """
    e = edge(*e)
    if e in current:
        raise ArgumentError(f"edge {e} is already in the current set")
    if current.n != sys.n:
        raise ArgumentError("edge set and constraint system disagree on n")
    if not sys.is_feasible(current.edges):
        raise ArgumentError("current edge set is infeasible")
    return sys.cause(current, e)


_SPEC_RE = re.compile(r"^\s*A=(?P<a>\S+)\s+b=(?P<b>\S+)\s+c=(?P<c>\S+)\s*$")


def parse_constraint_spec(text: str, n: int) -> ConstraintSystem:
    """Parse ``A=<acyclic|all|planar|tsp|planar_lower:i-j,...> b=<int|max> c=<int|n>``."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ArgumentError(f"bad constraint spec {text!r}")
    a = m["a"]
    if a.startswith("planar_lower"):
        _, _, body = a.partition(":")
        forbidden = []
        for tok in filter(None, body.split(",")):
            i, _, j = tok.partition("-")
            forbidden.append(edge(int(i), int(j)))
        oracle = PlanarBridged(forbidden)
    else:
        oracle = builtin_attachment(a, n=n)
    try:
        c = n if m["c"] == "n" else int(m["c"])
        b = c - 1 if m["b"] == "max" else int(m["b"])
    except ValueError:
        raise ArgumentError(f"bad constraint spec {text!r}") from None
    return ConstraintSystem(oracle, b, c, n)


@dataclass(frozen=True)
class Counterexample:
    axiom: str
    subgraph: Tuple[Edge, ...]
    edge: Optional[Edge]

    def __str__(self):
        f = "{" + ", ".join(f"{i}{j}" for i, j in self.subgraph) + "}"
        if self.edge is None:
            return "heredity: the empty subgraph is not a member"
        if self.axiom == "heredity":
            return f"heredity: F={f} is a member but F-{self.edge} is not"
        return (f"attachment: F={f} is a member, F+{self.edge} is not, "
                f"yet {self.edge[0]} and {self.edge[1]} are disconnected in F")


@dataclass(frozen=True)
class AxiomReport:
    heredity_ok: bool
    attachment_ok: bool
    heredity_counterexample: Optional[Counterexample] = None
    attachment_counterexample: Optional[Counterexample] = None
    all_counterexamples: Tuple[Counterexample, ...] = ()

    @property
    def ok(self) -> bool:
        return self.heredity_ok and self.attachment_ok

    @property
    def counterexample(self) -> Optional[Counterexample]:
        return self.heredity_counterexample or self.attachment_counterexample


MAX_AXIOM_N = 6


def verify_axioms(oracle: AttachmentOracle, n: int, collect_all: bool = False) -> AxiomReport:
    """Exhaustively check heredity and attachment over every subgraph of ``K_n``.

    Subgraphs are visited by size, then lexicographically, and the first
    failure of each axiom is reported.  With ``collect_all`` every failing
    (subgraph, edge) pair is gathered as well.
    """
    if n > MAX_AXIOM_N:
        raise ArgumentError(f"exhaustive axiom check is limited to n <= {MAX_AXIOM_N}")
    edges = all_edges(n)
    members = {}
    for size in range(len(edges) + 1):
        for f in combinations(edges, size):
            members[frozenset(f)] = oracle.member(f, n)
    found: List[Counterexample] = []
    her = att = None
    if not members[frozenset()]:
        # an empty family is vacuously hereditary, but greedy needs the empty start
        her = Counterexample("heredity", (), None)
        found.append(her)
    for size in range(len(edges) + 1):
        for f in combinations(edges, size):
            fs = frozenset(f)
            if not members[fs]:
                continue
            if her is None or collect_all:
                for e in f:
                    if not members[fs - {e}]:
                        found.append(Counterexample("heredity", f, e))
                        her = her or found[-1]
                        if not collect_all:
                            break
            if att is None or collect_all:
                es = None
                for e in edges:
                    if e in fs or members[fs | {e}]:
                        continue
                    es = es or EdgeSet(n, f)
                    if not es.connected(*e):
                        found.append(Counterexample("attachment", f, e))
                        att = att or found[-1]
                        if not collect_all:
                            break
            if her and att and not collect_all:
                break
    return AxiomReport(her is None, att is None, her, att, tuple(found))


def at_most_edges(k: int) -> AttachmentOracle:
    """Hereditary family that is *not* an attachment set; used to exercise the checker."""
    return AttachmentOracle(lambda edges, n: len(edges) <= k, name=f"at_most_{k}_edges")
