"""scikit-learn style front end.

A cut is a two-cluster labelling of the vertices, so the solver is exposed
as a clusterer: ``fit`` solves the instance and ``labels_[v]`` is 1 exactly
for the vertices on the source side of an optimal cut.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from ._validation import check_beta, check_graph, check_problem
from .dp import solve
from .objectives import BOTTOM, make_objective
from .pipeline import prepare_decomposition

__all__ = ["CutSolver"]


class CutSolver(ClusterMixin, BaseEstimator):
    """Exact cut solver parameterised by treewidth.

    Parameters
    ----------
    problem : str
        One of ``max-cut``, ``max-bisection``, ``min-bisection``,
        ``balanced-min-cut``, ``min-edge-expansion``, ``sparsest-cut``,
        ``densest-cut``.
    beta : rational, optional
        Balance parameter, required by ``balanced-min-cut`` only.
    witness : bool
        Also reconstruct an optimal vertex set (needed for ``labels_``).

    Attributes
    ----------
    value_ : Fraction, signed infinity or INFEASIBLE
    phi_ : CutValue or BOTTOM
    witness_ : frozenset of vertex labels, or None
    labels_ : ndarray of shape (n_vertices,), or None
    decomposition_ : NiceTreeDecomposition
    width_source_ : ``"given"`` or ``"heuristic"``
    report_ : SolveReport
    """

    def __init__(self, problem: str = "max-cut", beta=None, witness: bool = True):
        self.problem = problem
        self.beta = beta
        self.witness = witness

    def fit(self, X, y=None, decomposition=None):
        """Solve the cut problem on graph ``X``.

        ``decomposition`` is an optional TreeDecomposition over vertex
        indices ``0..n-1`` (in the order of ``X``'s vertices); without it a
        min-degree heuristic decomposition is built.
        """
        problem = check_problem(self.problem)
        beta = check_beta(problem, self.beta)
        G, labels = check_graph(X)
        obj = make_objective(problem, G.n, beta=beta)
        nice, source = prepare_decomposition(G, decomposition)
        report = solve(G, nice, obj, want_witness=self.witness)
        self.n_vertices_ = G.n
        self.decomposition_ = nice
        self.width_source_ = source
        self.report_ = report
        self.value_ = report.optimum
        self.phi_ = report.phi
        if report.witness is None:
            self.witness_ = None
            self.labels_ = None
        else:
            self.witness_ = frozenset(labels[v] for v in report.witness)
            self.labels_ = np.zeros(G.n, dtype=int)
            self.labels_[sorted(report.witness)] = 1
        return self

    def fit_predict(self, X, y=None, decomposition=None):
        if not self.witness:
            raise ValueError("fit_predict needs witness=True")
        return self.fit(X, decomposition=decomposition).labels_

    @property
    def feasible_(self) -> bool:
        return self.phi_ is not BOTTOM
