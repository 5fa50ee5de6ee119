"""validate -> shrink -> nicify -> solve, as one call."""

from __future__ import annotations

from .dp import SolveReport, solve
from .graph import WeightedDigraph
from .objectives import make_objective
from .treedecomp import (
    DecompositionError,
    NiceTreeDecomposition,
    TreeDecomposition,
    Violation,
    greedy_decomposition,
    nicify,
    shrink,
    validate,
)

__all__ = ["InvalidDecomposition", "prepare_decomposition", "solve_cut"]


class InvalidDecomposition(DecompositionError):
    def __init__(self, violation: Violation):
        self.violation = violation
        super().__init__(violation.describe())


def prepare_decomposition(G: WeightedDigraph, td: TreeDecomposition | None = None) -> tuple[NiceTreeDecomposition, str]:
    """Nice decomposition for ``G`` plus where its width came from.

    Without ``td`` a min-degree decomposition is used and the width is
    reported as ``"heuristic"``.
    """
    if td is None:
        td, source = greedy_decomposition(G), "heuristic"
    else:
        source = "given"
    problem = validate(G, td)
    if problem is not None:
        raise InvalidDecomposition(problem)
    return nicify(shrink(td), G), source


def solve_cut(
    G: WeightedDigraph,
    problem: str,
    td: TreeDecomposition | None = None,
    beta=None,
    witness: bool = False,
) -> SolveReport:
    obj = make_objective(problem, G.n, beta=beta)
    nice, source = prepare_decomposition(G, td)
    report = solve(G, nice, obj, want_witness=witness)
    report.stats["width_source"] = source
    return report
