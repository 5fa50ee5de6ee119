"""Exact solvers for weighted directed cut problems on graphs of bounded treewidth.

Given a tree decomposition of width ``t`` the solver runs in
``O(2^t n^2)`` time for max-cut, max/min-bisection, balanced min-cut,
min edge expansion, sparsest cut and densest cut, with arbitrary rational
weights.
"""

from .dp import DPTable, InternalInconsistency, SolveReport, solve
from .estimator import CutSolver
from .graph import WeightedDigraph, cut_weight, parse_graph, read_graph
from .instances import random_instance
from .objectives import (
    BOTTOM,
    INF,
    INFEASIBLE,
    NEG_INF,
    PROBLEMS,
    CutValue,
    Objective,
    make_objective,
    report_value,
)
from .oracle import brute_force_solve
from .pipeline import prepare_decomposition, solve_cut
from .treedecomp import (
    NiceTreeDecomposition,
    TreeDecomposition,
    greedy_decomposition,
    nicify,
    parse_td,
    read_td,
    shrink,
    smooth,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "BOTTOM",
    "INF",
    "INFEASIBLE",
    "NEG_INF",
    "PROBLEMS",
    "CutSolver",
    "CutValue",
    "DPTable",
    "InternalInconsistency",
    "NiceTreeDecomposition",
    "Objective",
    "SolveReport",
    "TreeDecomposition",
    "WeightedDigraph",
    "brute_force_solve",
    "cut_weight",
    "greedy_decomposition",
    "make_objective",
    "nicify",
    "parse_graph",
    "parse_td",
    "prepare_decomposition",
    "random_instance",
    "read_graph",
    "read_td",
    "report_value",
    "shrink",
    "smooth",
    "solve",
    "solve_cut",
    "validate",
]
