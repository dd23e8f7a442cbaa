from fractions import Fraction

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ordinal_greedy import OrdinalGreedy, kruskal_mst, matching_tight, ordinal_greedy, profile_from_weights
from ordinal_greedy.constraints import parse_constraint_spec
from ordinal_greedy.graph_core import all_edges


def matrix(inst):
    n = inst.n
    m = np.zeros((n, n), dtype=object)
    for (i, j), w in inst.weights.items():
        m[i, j] = m[j, i] = w
    for i in range(n):
        m[i, i] = Fraction(0)
    return m


def test_params_round_trip():
    est = OrdinalGreedy(attachment="acyclic", b="max", policy="random", seed=3)
    assert est.get_params()["seed"] == 3
    assert clone(est).get_params() == est.get_params()
    est.set_params(b=2)
    assert est.b == 2


def test_fit_transform_matches_engine():
    inst = matching_tight().instance
    est = OrdinalGreedy(attachment="all", b=1, c="n")
    adj = est.fit_transform(matrix(inst))
    prof = profile_from_weights(inst)
    trace = ordinal_greedy(prof, parse_constraint_spec("A=all b=1 c=n", 4))
    assert est.edges_ == sorted(trace.solution)
    assert est.weight_ == inst.total(trace.solution)
    assert adj.shape == (4, 4) and (adj == adj.T).all()
    assert {(i, j) for i, j in all_edges(4) if adj[i, j]} == trace.solution


def test_float_matrix_spanning_tree():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 10, size=(6, 6)).astype(float)
    a = np.triu(a, 1)
    a = a + a.T
    est = OrdinalGreedy(attachment="acyclic", b="max").fit(a)
    assert len(est.edges_) == 5
    assert est.adjacency_.sum() == 10


def test_validation():
    with pytest.raises(NotFittedError):
        OrdinalGreedy().transform(np.ones((3, 3)))
    with pytest.raises(ValueError):
        OrdinalGreedy().fit(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        OrdinalGreedy().fit(np.ones((3, 4)))
    with pytest.raises(ValueError):
        OrdinalGreedy(policy="worst").fit(np.ones((3, 3)))
    with pytest.raises(ValueError):
        OrdinalGreedy(b=0).fit(np.ones((3, 3)))
