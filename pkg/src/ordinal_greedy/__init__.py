"""Ordinal Greedy for maximum-weight subgraph problems under ABC constraint systems."""
from .constraints import (
    AttachmentOracle, AxiomReport, ConstraintSystem, Counterexample, EliminationCause, at_most_edges,
    builtin_attachment, classify_edge, parse_constraint_spec, verify_axioms,
)
from .graph_core import (
    ArgumentError, EdgeSet, PartialOrder, PreferenceProfile, Relation, WeightedInstance,
    build_partial_order, check_consistency, known_undominated, profile_from_weights,
)
from .greedy import (
    Adversarial, ChoicePolicy, GreedyRuns, GreedyTrace, Lexicographic, MinTrueWeight, SeededRandom,
    Solution, StabilityViolation, check_pairwise_stability, enumerate_greedy_runs, omniscient_greedy,
    ordinal_greedy, validate_trace,
)
from .instances import (
    FamilySpec, InstanceBundle, ParseError, abc_example2, closed_form, generate, load, loads,
    matching_tight, mst_example1, planar_lower, random_instance, save, dumps, tsp_lower,
)
from .oracles import (
    BinaryReduction, InvariantViolation, SparsityResult, assign_opt_edges, binary_reduce, brute_force_opt,
    held_karp_max_tsp, kruskal_mst, ratio, sparsity,
)
from .estimator import OrdinalGreedy

__version__ = "0.1.0"
