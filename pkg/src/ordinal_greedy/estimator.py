"""scikit-learn style wrapper: fit on a symmetric weight matrix, transform to an adjacency matrix."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .constraints import parse_constraint_spec
from .graph_core import ArgumentError, WeightedInstance, profile_from_weights
from .greedy import Lexicographic, SeededRandom, ordinal_greedy


class OrdinalGreedy(TransformerMixin, BaseEstimator):
    """Run Ordinal Greedy on the rankings induced by a weight matrix.

    Only the per-row rankings of ``X`` reach the algorithm; the weights are
    kept for reporting ``weight_``.

    Parameters
    ----------
    attachment : {"all", "acyclic", "planar", "tsp"}
    b, c : int or "max" / "n"
        Degree and component bounds, as in the constraint spec string.
    policy : {"lex", "random"}
    seed : int
        Seed for ``policy="random"``.
    tie_break : str
        Passed to :func:`profile_from_weights`.
    """

    def __init__(self, attachment="all", b=1, c="n", policy="lex", seed=0, tie_break="ascending"):
        self.attachment = attachment
        self.b = b
        self.c = c
        self.policy = policy
        self.seed = seed
        self.tie_break = tie_break

    def _instance(self, X) -> WeightedInstance:
        if isinstance(X, np.ndarray) and X.dtype == object:
            rows = [[Fraction(v) for v in row] for row in X]
        else:
            X = check_array(X, dtype=np.float64, ensure_min_samples=2, ensure_min_features=2)
            rows = [[Fraction(float(v)) for v in row] for row in X]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError(f"weight matrix must be square, got {n}x{len(rows[0])}")
        w = {}
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"weight matrix is not symmetric at ({i}, {j})")
                w[(i, j)] = rows[i][j]
        return WeightedInstance(n, w)

    def fit(self, X, y=None):
        inst = self._instance(X)
        sys = parse_constraint_spec(f"A={self.attachment} b={self.b} c={self.c}", inst.n)
        if self.policy == "lex":
            pol = Lexicographic()
        elif self.policy == "random":
            pol = SeededRandom(self.seed)
        else:
            raise ArgumentError(f"policy must be 'lex' or 'random', got {self.policy!r}")
        self.n_features_in_ = inst.n
        self.constraints_ = sys
        self.profile_ = profile_from_weights(inst, self.tie_break)
        self.trace_ = ordinal_greedy(self.profile_, sys, pol)
        self.edges_ = sorted(self.trace_.solution)
        self.weight_ = inst.total(self.edges_)
        adj = np.zeros((inst.n, inst.n), dtype=np.int64)
        for i, j in self.edges_:
            adj[i, j] = adj[j, i] = 1
        self.adjacency_ = adj
        return self

    def transform(self, X):
        """Adjacency matrix of the fitted solution; ``X`` is only shape-checked."""
        check_is_fitted(self, "adjacency_")
        if np.shape(X)[0] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} rows, got {np.shape(X)[0]}")
        return self.adjacency_.copy()
