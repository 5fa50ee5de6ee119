"""Exhaustive reference solver.

Enumerates every vertex subset, recomputes its cut from the raw arc list and
keeps the subsets with the best objective value. It shares the objectives
with the DP on purpose, so the two can only disagree about the search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import WeightedDigraph
from .objectives import INFEASIBLE, Objective

__all__ = ["TooLarge", "OracleResult", "brute_force_solve", "MAX_ORACLE_N"]

MAX_ORACLE_N = 22


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    optimum: object
    all_optimal_witnesses: tuple[frozenset[int], ...]


def _all_cuts(G: WeightedDigraph) -> tuple[np.ndarray, np.ndarray, int]:
    n = G.n
    den = math.lcm(1, *(w.denominator for _, _, w in G.arcs))
    nums = [(u, v, int(w * den)) for u, v, w in G.arcs]
    big = sum(abs(x) for *_, x in nums) >= 2**62
    masks = np.arange(1 << n, dtype=np.int64)
    cut = np.zeros(1 << n, dtype=object if big else np.int64)
    for u, v, x in nums:
        crosses = ((masks >> u) & 1) & (1 - ((masks >> v) & 1))
        cut += crosses.astype(cut.dtype) * x
    count = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        count += (masks >> v) & 1
    return count, cut, den


def brute_force_solve(G: WeightedDigraph, obj: Objective) -> OracleResult:
    if G.n > MAX_ORACLE_N:
        raise TooLarge(f"oracle limited to n <= {MAX_ORACLE_N}, got {G.n}")
    count, cut, den = _all_cuts(G)
    ok = np.array([obj.valid(x) for x in range(G.n + 1)])[count]
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return OracleResult(INFEASIBLE, ())
    # f is evaluated once per distinct (count, cut) pair
    values = {}
    for i in idx:
        key = (int(count[i]), int(cut[i]))
        if key not in values:
            values[key] = obj.f(key[0], Fraction(key[1], den))
    best = max(values.values())
    winners = {k for k, fv in values.items() if fv == best}
    witnesses = tuple(
        frozenset(v for v in range(G.n) if i >> v & 1)
        for i in idx
        if (int(count[i]), int(cut[i])) in winners
    )
    return OracleResult(obj.report(best), witnesses)
