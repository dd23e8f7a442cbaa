"""Adversarial instance families, random instances and the instance text format.

Text format, one directive per line, ``#`` starts a comment::

    n 4
    w 0 1 1/1            # one line per unordered pair
    pref 0 1 3 2         # optional, overrides the derived ranking of node 0
    constraints A=all b=1 c=n
    policy 0-1 2-3       # optional scripted choice sequence
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from .constraints import ConstraintSystem, PlanarBridged, builtin_attachment, parse_constraint_spec
from .graph_core import (
    ArgumentError, Edge, PreferenceProfile, WeightedInstance, all_edges, edge, format_fraction,
    profile_from_weights,
)
from .greedy import Adversarial, ChoicePolicy, Lexicographic, SeededRandom

DEFAULT_EPS = Fraction(1, 10**6)


class ParseError(ArgumentError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class InstanceBundle:
    instance: WeightedInstance
    profile: PreferenceProfile
    constraints: Optional[ConstraintSystem] = None
    policy: Optional[ChoicePolicy] = None
    name: str = field(default="", compare=False)

    def __iter__(self):
        return iter((self.instance, self.profile, self.constraints, self.policy))


@dataclass(frozen=True)
class FamilySpec:
    family: str
    params: Tuple[Tuple[str, object], ...] = ()

    @classmethod
    def of(cls, family: str, **params) -> "FamilySpec":
        return cls(family, tuple(sorted(params.items())))


def _priority_tiebreak(priority: Dict[int, List[int]]):
    """Ties at node x follow ``priority[x]`` first, then ascending index."""
    pos = {x: {y: i for i, y in enumerate(order)} for x, order in priority.items()}

    def key(x, y):
        p = pos.get(x, {})
        return (p.get(y, len(p)), y)
    return key


def _chain_priority(nodes: List[int]) -> Dict[int, List[int]]:
    # node i ranks its predecessor, then its successor: makes consecutive pairs mutual tops in turn
    out = {}
    for i, x in enumerate(nodes):
        order = []
        if i > 0:
            order.append(nodes[i - 1])
        if i + 1 < len(nodes):
            order.append(nodes[i + 1])
        out[x] = order
    return out


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise ArgumentError("eps must be a positive rational")
    return eps


def mst_example1(k: int, eps=DEFAULT_EPS) -> InstanceBundle:
    """Spanning-tree family: u_i = i, v_i = k + i."""
    if k < 2:
        raise ArgumentError("mst_example1 needs k >= 2")
    eps = _check_eps(eps)
    n = 2 * k
    u = list(range(k))
    v = [k + i for i in range(k)]
    w = {}
    for i in range(k):
        w[(u[i], v[i])] = 1 + eps
        for j in range(i + 1, k):
            w[(u[i], u[j])] = Fraction(1)
            w[(v[i], v[j])] = eps
    inst = WeightedInstance.from_dict(n, w)
    prof = profile_from_weights(inst, _priority_tiebreak(_chain_priority(v)))
    sys = ConstraintSystem(builtin_attachment("acyclic"), n - 1, n, n)
    script = [(u[i], v[i]) for i in range(k)] + [(v[i], v[i + 1]) for i in range(k - 1)]
    return InstanceBundle(inst, prof, sys, Adversarial(tuple(script)), f"mst_example1(k={k})")


def abc_example2(c: int, eps=DEFAULT_EPS) -> InstanceBundle:
    """Component-bounded family on c*c nodes; hub of group i is node i*c."""
    if c < 2:
        raise ArgumentError("abc_example2 needs c >= 2")
    eps = _check_eps(eps)
    n = c * c
    hub = [i * c for i in range(c)]
    w = {}
    for i in range(c):
        for j in range(1, c):
            w[(hub[i], hub[i] + j)] = Fraction(1)
        if i + 1 < c:
            w[(hub[i], hub[i + 1])] = 1 + eps
    inst = WeightedInstance.from_dict(n, w)
    prof = profile_from_weights(inst, _priority_tiebreak(_chain_priority(hub)))
    sys = ConstraintSystem(builtin_attachment("all"), c - 1, c, n)
    script = [(hub[i], hub[i + 1]) for i in range(c - 1)]
    return InstanceBundle(inst, prof, sys, Adversarial(tuple(script)), f"abc_example2(c={c})")


def tsp_lower(k: int, eps=DEFAULT_EPS) -> InstanceBundle:
    """Max-TSP family: u_1..u_k are nodes 0..k-1, v_1..v_{k-3} are nodes k..2k-4."""
    if k < 4:
        raise ArgumentError("tsp_lower needs k >= 4")
    eps = _check_eps(eps)
    n = 2 * k - 3
    u = {i: i - 1 for i in range(1, k + 1)}
    v = {i: k + i - 1 for i in range(1, k - 2)}
    w = {}
    for i in range(1, k):
        w[(u[i], u[i + 1])] = 1 + eps
    for i in range(1, k - 2):
        w[(v[i], u[i + 1])] = Fraction(1)
        w[(v[i], u[i + 2])] = Fraction(1)
    w[(u[1], u[k - 1])] = Fraction(1)
    w[(u[2], u[k])] = Fraction(1)
    w[(u[1], u[k])] = Fraction(1)
    inst = WeightedInstance.from_dict(n, w)
    # zero-weight completion u_1 - v_1 - ... - v_{k-3} - u_k is scripted explicitly
    tail = [u[1]] + [v[i] for i in range(1, k - 2)] + [u[k]]
    prio = _chain_priority([u[i] for i in range(1, k + 1)])
    for i, x in enumerate(tail):
        nbrs = [tail[j] for j in (i - 1, i + 1) if 0 <= j < len(tail)]
        prio.setdefault(x, [])
        prio[x] = prio[x] + [y for y in nbrs if y not in prio[x]]
    prof = profile_from_weights(inst, _priority_tiebreak(prio))
    sys = ConstraintSystem(builtin_attachment("tsp", n=n), 2, n, n)
    script = [(u[i], u[i + 1]) for i in range(1, k)]
    script += [(u[1], v[1]), (u[k], v[k - 3])] + [(v[i], v[i + 1]) for i in range(1, k - 3)]
    return InstanceBundle(inst, prof, sys, Adversarial(tuple(script)), f"tsp_lower(k={k})")


def planar_lower(k: int, eps=DEFAULT_EPS) -> InstanceBundle:
    """Sparse-system family: u_i = i, v_i = k + i; each (u_i, v_i) must stay a bridge."""
    if k < 3:
        raise ArgumentError("planar_lower needs k >= 3")
    eps = _check_eps(eps)
    n = 2 * k
    u = list(range(k))
    v = [k + i for i in range(k)]
    w = {}
    for i in range(k):
        w[(u[i], v[i])] = 1 + eps
        for j in range(i + 1, k):
            w[(u[i], u[j])] = Fraction(1)
    inst = WeightedInstance.from_dict(n, w)
    prof = profile_from_weights(inst, _priority_tiebreak(_chain_priority(v)))
    oracle = PlanarBridged([(u[i], v[i]) for i in range(k)])
    sys = ConstraintSystem(oracle, n - 1, n, n)
    script = [(u[i], v[i]) for i in range(k)] + [(v[i], v[i + 1]) for i in range(k - 1)]
    return InstanceBundle(inst, prof, sys, Adversarial(tuple(script)), f"planar_lower(k={k})")


def matching_tight() -> InstanceBundle:
    """Four nodes u1=0, u2=1, v1=2, v2=3 with b = 1."""
    u1, u2, v1, v2 = 0, 1, 2, 3
    w = {(u1, u2): 1, (v1, v2): 1, (u1, v1): 1}
    inst = WeightedInstance.from_dict(4, w)
    # u1 and v1 rank each other first among their weight-1 partners
    prof = profile_from_weights(inst, _priority_tiebreak({u1: [v1], v1: [u1]}))
    sys = ConstraintSystem(builtin_attachment("all"), 1, 4, 4)
    return InstanceBundle(inst, prof, sys, Adversarial(((u1, v1), (u2, v2))), "matching_tight")


def _random_tiebreak(n: int, rng: random.Random):
    perms = {x: rng.sample(range(n), n) for x in range(n)}
    return _priority_tiebreak(perms)


def random_instance(n: int, max_numerator: int = 12, max_denominator: int = 3, seed: int = 0,
                    constraints: str = "A=all b=1 c=n") -> InstanceBundle:
    """Rational weights a/q with a uniform in [0, max_numerator], q in [1, max_denominator]."""
    if n < 2:
        raise ArgumentError("random instances need n >= 2")
    rng = random.Random(seed)
    w = {e: Fraction(rng.randint(0, max_numerator), rng.randint(1, max_denominator)) for e in all_edges(n)}
    inst = WeightedInstance(n, w)
    prof = profile_from_weights(inst, _random_tiebreak(n, rng))
    return InstanceBundle(inst, prof, parse_constraint_spec(constraints, n), SeededRandom(seed),
                          f"random(n={n}, seed={seed})")


def binary_random(n: int, p_one: float = 0.5, seed: int = 0,
                  constraints: str = "A=all b=1 c=n") -> InstanceBundle:
    if n < 2:
        raise ArgumentError("random instances need n >= 2")
    if not 0 <= p_one <= 1:
        raise ArgumentError("p_one must lie in [0, 1]")
    rng = random.Random(seed)
    w = {e: Fraction(int(rng.random() < p_one)) for e in all_edges(n)}
    inst = WeightedInstance(n, w)
    prof = profile_from_weights(inst, _random_tiebreak(n, rng))
    return InstanceBundle(inst, prof, parse_constraint_spec(constraints, n), SeededRandom(seed),
                          f"binary_random(n={n}, seed={seed})")


FAMILIES = {
    "mst_example1": mst_example1,
    "abc_example2": abc_example2,
    "tsp_lower": tsp_lower,
    "planar_lower": planar_lower,
    "matching_tight": matching_tight,
    "random": random_instance,
    "binary_random": binary_random,
}


def generate(spec: Union[FamilySpec, str], **params) -> InstanceBundle:
    if isinstance(spec, FamilySpec):
        params = {**dict(spec.params), **params}
        spec = spec.family
    if spec not in FAMILIES:
        raise ArgumentError(f"unknown family {spec!r}; choose from {sorted(FAMILIES)}")
    try:
        return FAMILIES[spec](**params)
    except TypeError as exc:
        raise ArgumentError(f"bad parameters for {spec}: {exc}") from None


# closed forms for the adversarial families, as (greedy weight, optimum weight)
def closed_form(family: str, size: int, eps=DEFAULT_EPS) -> Tuple[Fraction, Fraction]:
    eps = Fraction(eps)
    if family == "mst_example1":
        k = size
        return k * (1 + eps) + (k - 1) * eps, k * (1 + eps) + (k - 1)
    if family == "abc_example2":
        c = size
        return (c - 1) * (1 + eps), Fraction((c - 1) * c)
    if family == "tsp_lower":
        k = size
        return (k - 1) * (1 + eps), 2 * k - 3 + 2 * eps
    if family == "planar_lower":
        k = size
        return k * (1 + eps), 4 * k - 6 + eps * k
    raise ArgumentError(f"no closed form for {family!r}")


def dumps(bundle: InstanceBundle) -> str:
    inst, prof, sys, policy = bundle
    lines = []
    if bundle.name:
        lines.append(f"# {bundle.name}")
    lines.append(f"n {inst.n}")
    for (i, j) in all_edges(inst.n):
        lines.append(f"w {i} {j} {format_fraction(inst.weights[(i, j)])}")
    for x, p in enumerate(prof.prefs):
        lines.append("pref " + " ".join(map(str, (x,) + p)))
    if sys is not None:
        lines.append("constraints " + sys.spec())
    if isinstance(policy, Adversarial):
        lines.append("policy " + " ".join(f"{i}-{j}" for i, j in policy.script))
    return "\n".join(lines) + "\n"


def loads(text: str) -> InstanceBundle:
    n = None
    weights: Dict[Edge, Fraction] = {}
    prefs: Dict[int, Tuple[int, ...]] = {}
    pref_line: Dict[int, int] = {}
    constraints = None
    script = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "n":
                if n is not None:
                    raise ParseError("duplicate n line", lineno)
                n = int(rest[0])
                if n < 1 or len(rest) != 1:
                    raise ParseError("n must be one positive integer", lineno)
            elif n is None:
                raise ParseError("the first directive must be 'n <count>'", lineno)
            elif head == "w":
                if len(rest) != 3:
                    raise ParseError("expected 'w <i> <j> <num>/<den>'", lineno)
                i, j = int(rest[0]), int(rest[1])
                if i == j:
                    raise ParseError(f"self-loop {i}-{j}", lineno)
                if not (0 <= i < n and 0 <= j < n):
                    raise ParseError(f"node out of range in {i}-{j}", lineno)
                e = edge(i, j)
                if e in weights:
                    raise ParseError(f"duplicate weight for {e[0]}-{e[1]}", lineno)
                w = Fraction(rest[2])
                if w < 0:
                    raise ParseError(f"negative weight {rest[2]}", lineno)
                weights[e] = w
            elif head == "pref":
                x, order = int(rest[0]), tuple(int(t) for t in rest[1:])
                if not 0 <= x < n or x in prefs:
                    raise ParseError(f"bad or duplicate pref line for node {x}", lineno)
                if sorted(order) != [y for y in range(n) if y != x]:
                    raise ParseError(f"pref for node {x} must list every other node once", lineno)
                prefs[x] = order
                pref_line[x] = lineno
            elif head == "constraints":
                constraints = (" ".join(rest), lineno)
            elif head == "policy":
                script = []
                for tok in rest:
                    i, _, j = tok.partition("-")
                    script.append(edge(int(i), int(j)))
            else:
                raise ParseError(f"unknown directive {head!r}", lineno)
        except ParseError:
            raise
        except (ValueError, IndexError, ZeroDivisionError, ArgumentError) as exc:
            raise ParseError(str(exc) or f"malformed {head!r} line", lineno) from None
    if n is None:
        raise ParseError("missing 'n' line")
    missing = [e for e in all_edges(n) if e not in weights]
    if missing:
        raise ParseError("missing weights for pairs " + ", ".join(f"{i}-{j}" for i, j in missing))
    inst = WeightedInstance(n, weights)
    derived = profile_from_weights(inst)
    for x, order in sorted(prefs.items()):
        for y, z in zip(order, order[1:]):
            if inst.w(x, y) < inst.w(x, z):
                raise ParseError(f"node {x} ranks {y} above {z} but w({x},{y}) < w({x},{z})", pref_line[x])
    prof = PreferenceProfile(tuple(prefs.get(x, derived.prefs[x]) for x in range(n)))
    sys = None
    if constraints is not None:
        try:
            sys = parse_constraint_spec(constraints[0], n)
        except ArgumentError as exc:
            raise ParseError(str(exc), constraints[1]) from None
    policy = Adversarial(tuple(script)) if script is not None else None
    return InstanceBundle(inst, prof, sys, policy)


def save(path: Union[str, Path], bundle: InstanceBundle) -> None:
    Path(path).write_text(dumps(bundle))


def load(path: Union[str, Path]) -> InstanceBundle:
    return loads(Path(path).read_text())
