from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from ordinal_greedy import (
    Adversarial, ArgumentError, EdgeSet, EliminationCause, GreedyTrace, Lexicographic, MinTrueWeight,
    PreferenceProfile, SeededRandom, StabilityViolation, WeightedInstance, build_partial_order,
    check_pairwise_stability, enumerate_greedy_runs, known_undominated, matching_tight, mst_example1,
    omniscient_greedy, ordinal_greedy, parse_constraint_spec, profile_from_weights, random_instance,
    validate_trace,
)
from ordinal_greedy.graph_core import all_edges
from ordinal_greedy.harness import local_monotonicity_failures
from ordinal_greedy.oracles import kruskal_mst

SPECS = ["A=acyclic b=max c=n", "A=all b=1 c=n", "A=all b=2 c=n", "A=all b=3 c=n",
         "A=all b=max c=2", "A=all b=max c=3", "A=planar b=max c=n", "A=tsp b=2 c=n"]
EPS = Fraction(1, 1000)


@st.composite
def random_case(draw, max_n=7):
    n = draw(st.integers(3, max_n))
    spec = draw(st.sampled_from(SPECS))
    seed = draw(st.integers(0, 10**6))
    try:
        return random_instance(n, seed=seed, constraints=spec)
    except ArgumentError:
        return random_instance(n, seed=seed, constraints="A=all b=1 c=n")


def reference_greedy(prof, sys, choose):
    """Slow literal ordinal greedy: full re-filter of every available edge, no incremental tricks."""
    avail = set(all_edges(prof.n))
    sol = []
    while avail:
        e = choose(known_undominated(avail, prof))
        sol.append(e)
        avail.discard(e)
        avail = {f for f in avail if sys.is_feasible(sol + [f])}
    return frozenset(sol)


# --- ordinal_greedy ---------------------------------------------------------

def test_example1_k3_adversarial_weight():
    inst, prof, sys, policy = mst_example1(3, EPS)
    trace = ordinal_greedy(prof, sys, policy)
    assert inst.total(trace.solution) == 3 * (1 + EPS) + 2 * EPS


def test_matching_tight_scripted_run():
    inst, prof, sys, policy = matching_tight()
    trace = ordinal_greedy(prof, sys, policy)
    assert trace.solution == {(0, 2), (1, 3)}
    assert inst.total(trace.solution) == 1


def test_two_nodes_single_edge():
    prof = PreferenceProfile(((1,), (0,)))
    sys = parse_constraint_spec("A=all b=1 c=n", 2)
    trace = ordinal_greedy(prof, sys)
    assert trace.steps[0].edge == (0, 1) and trace.solution == {(0, 1)}


def test_profile_system_size_mismatch():
    with pytest.raises(ArgumentError):
        ordinal_greedy(PreferenceProfile(((1,), (0,))), parse_constraint_spec("A=all b=1 c=n", 3))


def test_policy_outside_candidates_rejected():
    class Rogue(Lexicographic):
        def chooser(self):
            return lambda cands, cur: (0, 99)
    inst, prof, sys, _ = matching_tight()
    with pytest.raises(ArgumentError):
        ordinal_greedy(prof, sys, Rogue())


def test_adversarial_falls_back_to_lexicographic():
    inst, prof, sys, _ = random_instance(6, seed=3, constraints="A=all b=2 c=n")
    assert ordinal_greedy(prof, sys, Adversarial(())) == ordinal_greedy(prof, sys, Lexicographic())


@given(random_case(), st.integers(0, 1000))
def test_engine_matches_literal_reference(bundle, seed):
    inst, prof, sys, _ = bundle
    import random
    rng = random.Random(seed)
    trace = ordinal_greedy(prof, sys, SeededRandom(seed))
    rng2 = random.Random(seed)
    ref = reference_greedy(prof, sys, lambda cands: rng2.choice(cands))
    assert trace.solution == ref


@given(random_case(), st.integers(0, 50))
def test_trace_invariants(bundle, seed):
    inst, prof, sys, _ = bundle
    trace = ordinal_greedy(prof, sys, SeededRandom(seed))
    # determinism
    assert trace == ordinal_greedy(prof, sys, SeededRandom(seed))
    # every edge exactly once
    assert sorted(s.edge for s in trace.steps) == all_edges(sys.n)
    # feasible and maximal
    assert sys.is_feasible(trace.solution)
    for e in all_edges(sys.n):
        if e not in trace.solution:
            assert not sys.is_feasible(trace.solution | {e})
    # causes match classify_edge recomputed at each step
    validate_trace(trace, prof, sys)
    assert local_monotonicity_failures(trace, prof) == []


def test_trace_dump_parse_round_trip():
    inst, prof, sys, policy = mst_example1(3, EPS)
    trace = ordinal_greedy(prof, sys, policy)
    text = trace.dump()
    assert text.splitlines()[0] == "1 0-3 ADD"
    assert GreedyTrace.parse(text, n=6) == trace
    with pytest.raises(ArgumentError, match="line 1"):
        GreedyTrace.parse("1 0-3 MAYBE\n")


def test_validate_trace_rejects_tampering():
    inst, prof, sys, policy = matching_tight()
    trace = ordinal_greedy(prof, sys, policy)
    steps = list(trace.steps)
    steps[1] = type(steps[1])(steps[1].iteration, steps[1].edge, EliminationCause.VIOLATES_A)
    with pytest.raises(ArgumentError):
        validate_trace(GreedyTrace(4, tuple(steps)), prof, sys)
    with pytest.raises(ArgumentError):
        validate_trace(GreedyTrace(4, trace.steps[:-1]), prof, sys)


def test_min_true_weight_is_test_only():
    inst, prof, sys, _ = matching_tight()
    assert MinTrueWeight(inst).test_only and not Lexicographic.test_only


# --- omniscient_greedy ------------------------------------------------------

def test_omniscient_example1_k3():
    inst, prof, sys, _ = mst_example1(3, EPS)
    assert inst.total(omniscient_greedy(inst, sys).solution) == 3 * (1 + EPS) + 2


@given(random_case(max_n=8))
def test_omniscient_mst_equals_kruskal(bundle):
    inst = bundle.instance
    sys = parse_constraint_spec("A=acyclic b=max c=n", inst.n)
    assert inst.total(omniscient_greedy(inst, sys).solution) == kruskal_mst(inst).total_weight


def test_omniscient_all_zero():
    inst = WeightedInstance.from_dict(5, {})
    sys = parse_constraint_spec("A=all b=2 c=n", 5)
    trace = omniscient_greedy(inst, sys)
    assert inst.total(trace.solution) == 0
    assert all(not sys.is_feasible(trace.solution | {e}) for e in all_edges(5) if e not in trace.solution)


def test_omniscient_step_is_weight_rank():
    inst, _, sys, _ = mst_example1(2, EPS)
    trace = omniscient_greedy(inst, sys)
    assert [s.iteration for s in trace.steps] == list(range(1, 7))


# --- enumerate_greedy_runs --------------------------------------------------

def test_enumerate_example1_k2_both_outcomes():
    inst, prof, sys, _ = mst_example1(2, EPS)
    weights = {s.total_weight for s in enumerate_greedy_runs(prof, sys).weighted(inst)}
    assert 2 * (1 + EPS) + 1 in weights
    assert 2 * (1 + EPS) + EPS in weights


def test_enumerate_single_dominating_pair():
    # (0,1) is every node's favourite edge; all runs start with it
    inst = WeightedInstance.from_dict(4, {(0, 1): 9, (2, 3): 1, (0, 2): 2, (1, 3): 2})
    prof = profile_from_weights(inst)
    sys = parse_constraint_spec("A=all b=1 c=n", 4)
    runs = enumerate_greedy_runs(prof, sys)
    assert all((0, 1) in s for s in runs.solutions)


def test_enumerate_n2():
    prof = PreferenceProfile(((1,), (0,)))
    runs = enumerate_greedy_runs(prof, parse_constraint_spec("A=all b=1 c=n", 2))
    assert len(runs) == 1 and runs.complete


def test_enumerate_cap_flags_partial():
    inst = WeightedInstance.from_dict(6, {}, default=1)
    prof = PreferenceProfile(tuple(tuple((x + d) % 6 for d in range(1, 6)) for x in range(6)))
    runs = enumerate_greedy_runs(prof, parse_constraint_spec("A=all b=2 c=n", 6), cap=3)
    assert not runs.complete


def naive_runs(prof, sys):
    """Reference enumeration without memoisation."""
    out = set()

    def go(sol, avail):
        if not avail:
            out.add(frozenset(sol))
            return
        for e in known_undominated(avail, prof):
            s2 = sol + [e]
            go(s2, {f for f in avail if f != e and sys.is_feasible(s2 + [f])})
    go([], set(all_edges(prof.n)))
    return out


@given(random_case(max_n=5))
def test_enumerate_matches_naive(bundle):
    inst, prof, sys, _ = bundle
    assert enumerate_greedy_runs(prof, sys).solutions == naive_runs(prof, sys)


# --- pairwise stability -----------------------------------------------------

def test_stability_violation_triangle():
    inst = WeightedInstance.from_dict(3, {(0, 1): 1, (0, 2): 5})
    sys = parse_constraint_spec("A=all b=1 c=n", 3)
    v = check_pairwise_stability(inst, sys, [(0, 1)])
    assert isinstance(v, StabilityViolation) and not v
    assert (v.x, v.y, v.f_x, v.f_y) == (0, 2, ((0, 1),), ())


def test_stability_empty_on_zero_weights():
    inst = WeightedInstance.from_dict(4, {})
    sys = parse_constraint_spec("A=all b=1 c=n", 4)
    assert check_pairwise_stability(inst, sys, []) is True


def test_stability_refusals():
    inst = WeightedInstance.from_dict(8, {})
    with pytest.raises(ArgumentError):
        check_pairwise_stability(inst, parse_constraint_spec("A=all b=7 c=n", 8), [])
    with pytest.raises(ArgumentError):
        check_pairwise_stability(inst, parse_constraint_spec("A=all b=1 c=n", 8), [(0, 1), (0, 2)])


def literal_stable(inst, sys, sol):
    """Every subset pair, straight from the definition."""
    w = inst.weights
    for x, y in all_edges(inst.n):
        if (x, y) in sol:
            continue
        at_x = [e for e in sol if x in e]
        at_y = [e for e in sol if y in e]
        for r in range(len(at_x) + 1):
            for fx in combinations(at_x, r):
                if not w[(x, y)] > sum((w[e] for e in fx), Fraction(0)):
                    continue
                for q in range(len(at_y) + 1):
                    for fy in combinations(at_y, q):
                        if w[(x, y)] > sum((w[e] for e in fy), Fraction(0)) and \
                                sys.is_feasible((set(sol) - set(fx) - set(fy)) | {(x, y)}):
                            return False
    return True


@given(random_case(max_n=6), st.data())
def test_stability_checker_matches_definition(bundle, data):
    inst, prof, sys, _ = bundle
    # arbitrary feasible (not necessarily greedy) solutions
    order = data.draw(st.permutations(all_edges(inst.n)))
    cur = EdgeSet(inst.n)
    for e in order:
        if sys.cause(cur, e) is EliminationCause.ADDED and data.draw(st.booleans()):
            cur.add(e)
    if sys.b > 6:
        return
    got = check_pairwise_stability(inst, sys, cur.edges)
    assert (got is True) == literal_stable(inst, sys, frozenset(cur.edges))


@given(random_case(max_n=7), st.integers(0, 20))
def test_greedy_outputs_are_stable(bundle, seed):
    inst, prof, sys, _ = bundle
    if sys.b > 6:
        return
    trace = ordinal_greedy(prof, sys, SeededRandom(seed))
    assert check_pairwise_stability(inst, sys, trace.solution) is True
