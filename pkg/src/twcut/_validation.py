"""Input checks shared by the estimator, the pipeline and the CLI."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .graph import WeightedDigraph, to_rational
from .objectives import PROBLEMS

__all__ = ["check_graph", "check_problem", "check_beta"]


def check_problem(problem: str) -> str:
    if problem not in PROBLEMS:
        raise ValueError(f"unknown problem {problem!r}; expected one of {', '.join(PROBLEMS)}")
    return problem


def check_beta(problem: str, beta) -> Fraction | None:
    if problem == "balanced-min-cut":
        if beta is None:
            raise ValueError("balanced-min-cut requires beta")
        beta = to_rational(beta)
        if not 0 < beta <= Fraction(1, 2):
            raise ValueError(f"beta must lie in (0, 1/2], got {beta}")
        return beta
    if beta is not None:
        raise ValueError(f"beta is only meaningful for balanced-min-cut, not {problem}")
    return None


def check_graph(X, weight: str = "weight") -> tuple[WeightedDigraph, list]:
    """Coerce ``X`` to a WeightedDigraph and return it with its vertex labels.

    Accepts a WeightedDigraph, a networkx (Di)Graph (edge attribute
    ``weight``, default 1; undirected edges become two arcs) or a square
    weight matrix where ``X[u][v]`` is the weight of arc ``u -> v``.
    """
    if isinstance(X, WeightedDigraph):
        return X, list(range(X.n))
    try:
        import networkx as nx
    except ImportError:  # pragma: no cover
        nx = None
    if nx is not None and isinstance(X, nx.Graph):
        labels = list(X.nodes)
        index = {v: i for i, v in enumerate(labels)}
        arcs = []
        for u, v, data in X.edges(data=True):
            w = data.get(weight, 1)
            arcs.append((index[u], index[v], w))
            if not X.is_directed():
                arcs.append((index[v], index[u], w))
        return WeightedDigraph(len(labels), arcs), labels
    A = np.asarray(X, dtype=object)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square weight matrix, got shape {A.shape}")
    n = A.shape[0]
    arcs = []
    for u in range(n):
        for v in range(n):
            w = to_rational(A[u, v])
            if w:
                arcs.append((u, v, w))
    return WeightedDigraph(n, arcs), list(range(n))
