"""Dynamic program over nice tree decompositions.

For a node ``i`` with bag ``X_i`` and forgotten set ``F_i`` the table
``Gamma_i(l, S)`` holds, for ``S`` a subset of ``X_i`` and ``0 <= l <= |F_i|``,
the best ``(count, weight)`` over all selections made of ``S`` plus ``l``
forgotten vertices, where weight only counts arcs with both ends in the
subtree below ``i``. Subsets are bitmasks over bag positions (ascending
vertex id), and weights are integers in units of ``1 / G.scale``.

Every supremum taken during the sweep compares tuples with the same first
component, and for a fixed count the objective is monotone or antitone in
the weight. The recurrences therefore keep the largest or the smallest
weight per entry, preferring the first operand on ties.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graph import WeightedDigraph, cut_weight
from .objectives import (
    BOTTOM,
    CutValue,
    Objective,
    evaluate_f,
    report_value,
)
from .treedecomp import NiceTreeDecomposition, NodeKind

__all__ = [
    "InternalInconsistency",
    "DPTable",
    "SolveReport",
    "sup",
    "bag_cut_profile",
    "leaf_table",
    "forget_table",
    "introduce_table",
    "join_table",
    "root_aggregate",
    "compute_tables",
    "solve",
    "reconstruct_witness",
]


class InternalInconsistency(RuntimeError):
    """A stored table entry could not be reproduced; indicates a bug."""


@lru_cache(maxsize=None)
def _bits(k: int) -> np.ndarray:
    """Row ``S`` holds the 0/1 membership of each of ``k`` positions in ``S``."""
    out = (np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _popcount(k: int) -> np.ndarray:
    out = _bits(k).sum(axis=1)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _insert_bit(k: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Masks over ``k + 1`` positions obtained by inserting a 0/1 at ``p``."""
    S = np.arange(1 << k)
    low = S & ((1 << p) - 1)
    without = low | ((S >> p) << (p + 1))
    return without, without | (1 << p)


@lru_cache(maxsize=None)
def _drop_bit(k: int, p: int) -> np.ndarray:
    """For masks over ``k`` positions, the mask with position ``p`` removed."""
    S = np.arange(1 << k)
    return (S & ((1 << p) - 1)) | ((S >> (p + 1)) << p)


@dataclass(frozen=True, eq=False)
class DPTable:
    """``Gamma_i`` as two ``(|F_i| + 1) x 2^|X_i|`` arrays.

    ``counts`` is carried through the recurrences rather than derived, so the
    identity ``counts[l, S] == l + |S|`` is a real check on the sweep.
    """

    node: int
    bag: tuple[int, ...]
    weights: np.ndarray
    counts: np.ndarray
    scale: int

    @property
    def num_forgotten(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def size(self) -> int:
        return self.weights.size

    def entry(self, ell: int, S: int) -> CutValue:
        return CutValue(int(self.counts[ell, S]), Fraction(int(self.weights[ell, S]), self.scale))

    def mask(self, vertices) -> int:
        pos = {v: i for i, v in enumerate(self.bag)}
        return sum(1 << pos[v] for v in vertices)

    def vertices(self, S: int) -> frozenset[int]:
        return frozenset(v for i, v in enumerate(self.bag) if S >> i & 1)


@dataclass
class SolveReport:
    problem: str
    optimum: object
    phi: object
    witness: frozenset[int] | None = None
    stats: dict = field(default_factory=dict)

    @property
    def count(self) -> int | None:
        return None if self.phi is BOTTOM else self.phi.count


def sup(a, b, obj: Objective):
    """Binary supremum under the f-image order; ⊥ is least.

    On an f-tie between equal counts the weight decides in the objective's
    direction, matching the table sweeps; otherwise ties keep ``a``.
    """
    if b is BOTTOM:
        return a
    if a is BOTTOM:
        return b
    fa, fb = evaluate_f(obj, a), evaluate_f(obj, b)
    if fb != fa or b[0] != a[0]:
        return b if fb > fa else a
    better = b[1] > a[1] if obj.maximises_weight else b[1] < a[1]
    return b if better else a


def _choose_first(a: np.ndarray, b: np.ndarray, obj: Objective) -> np.ndarray:
    return a >= b if obj.maximises_weight else a <= b


def _bag_matrix(bag, G: WeightedDigraph) -> np.ndarray:
    idx = np.asarray(bag, dtype=np.intp)
    return G.int_weights[np.ix_(idx, idx)]


def _profile(bag, G: WeightedDigraph) -> np.ndarray:
    """Scaled weight of arcs from ``S`` to ``bag - S`` for every mask ``S``.

    Built incrementally: a mask with highest position ``p`` extends the mask
    without ``p`` by adding the arcs from that vertex to everything outside
    and removing the arcs from the smaller mask into it.
    """
    k = len(bag)
    W = _bag_matrix(bag, G)
    prof = np.zeros(1 << k, dtype=G.dtype)
    for p in range(k):
        lo = 1 << p
        M = _bits(p)
        delta = W[p].sum() - M @ W[p, :p] - M @ W[:p, p]
        prof[lo : 2 * lo] = prof[:lo] + delta
    return prof


def bag_cut_profile(bag, G: WeightedDigraph) -> list[CutValue]:
    """``(|S|, weight of arcs S -> bag - S)`` for every mask ``S`` of ``bag``."""
    bag = tuple(sorted(bag))
    prof = _profile(bag, G)
    pc = _popcount(len(bag))
    return [CutValue(int(pc[S]), Fraction(int(prof[S]), G.scale)) for S in range(len(prof))]


def leaf_table(bag, G: WeightedDigraph, obj: Objective, node: int = -1) -> DPTable:
    bag = tuple(sorted(bag))
    prof = _profile(bag, G)
    return DPTable(node, bag, prof[None, :].copy(), _popcount(len(bag))[None, :].copy(), G.scale)


def forget_table(child: DPTable, v: int, obj: Objective, node: int = -1) -> DPTable:
    """Decide for the forgotten vertex ``v`` whether to keep it selected."""
    p = child.bag.index(v)
    bag = child.bag[:p] + child.bag[p + 1 :]
    out_of, into = _insert_bit(len(bag), p)
    wj, cj = child.weights, child.counts
    Fj = child.num_forgotten
    w = np.empty((Fj + 2, 1 << len(bag)), dtype=wj.dtype)
    c = np.empty(w.shape, dtype=cj.dtype)
    w[0], c[0] = wj[0, out_of], cj[0, out_of]
    if Fj:
        wa, wb = wj[:Fj, into], wj[1:, out_of]
        take = _choose_first(wa, wb, obj)
        w[1 : Fj + 1] = np.where(take, wa, wb)
        c[1 : Fj + 1] = np.where(take, cj[:Fj, into], cj[1:, out_of])
    w[Fj + 1], c[Fj + 1] = wj[Fj, into], cj[Fj, into]
    return DPTable(node, bag, w, c, child.scale)


def _introduce_delta(bag, v, G: WeightedDigraph) -> tuple[np.ndarray, np.ndarray]:
    """Per-mask tuple added when ``v`` joins the bag: it is the same for every l."""
    k = len(bag)
    p = bag.index(v)
    W = _bag_matrix(bag, G)
    M = _bits(k)
    inside = M[:, p].astype(bool)
    dw = np.where(inside, (1 - M) @ W[p], M @ W[:, p])
    return dw, M[:, p]


def introduce_table(child: DPTable, v: int, bag, G: WeightedDigraph, obj: Objective, node: int = -1) -> DPTable:
    bag = tuple(sorted(bag))
    p = bag.index(v)
    strip = _drop_bit(len(bag), p)
    dw, dc = _introduce_delta(bag, v, G)
    w = child.weights[:, strip] + dw[None, :]
    c = child.counts[:, strip] + dc[None, :]
    return DPTable(node, bag, w, c, child.scale)


def join_table(left: DPTable, right: DPTable, bag, G: WeightedDigraph, obj: Objective, node: int = -1) -> DPTable:
    """Best split of ``l`` between both branches, minus the doubly counted part.

    Vertices of ``S`` and arcs from ``S`` to the rest of the bag are seen by
    both children, so ``(|S|, cut of S inside the bag)`` is subtracted once.
    """
    bag = tuple(sorted(bag))
    if left.bag != bag or right.bag != bag:
        raise ValueError("join children must share the parent's bag")
    a, b = (left, right) if left.num_forgotten <= right.num_forgotten else (right, left)
    Fa, Fb = a.num_forgotten, b.num_forgotten
    w = np.empty((Fa + Fb + 1, 1 << len(bag)), dtype=a.weights.dtype)
    c = np.empty(w.shape, dtype=a.counts.dtype)
    w[: Fb + 1] = a.weights[0] + b.weights
    c[: Fb + 1] = a.counts[0] + b.counts
    for l1 in range(1, Fa + 1):
        cw = a.weights[l1] + b.weights
        cc = a.counts[l1] + b.counts
        cur = w[l1 : l1 + Fb]
        keep = _choose_first(cur, cw[:Fb], obj)
        w[l1 : l1 + Fb] = np.where(keep, cur, cw[:Fb])
        c[l1 : l1 + Fb] = np.where(keep, c[l1 : l1 + Fb], cc[:Fb])
        w[l1 + Fb], c[l1 + Fb] = cw[Fb], cc[Fb]
    w -= _profile(bag, G)[None, :]
    c -= _popcount(len(bag))[None, :]
    return DPTable(node, bag, w, c, a.scale)


def root_aggregate(table: DPTable, obj: Objective, return_choice: bool = False):
    """Supremum of the valid root entries (⊥ if none is valid)."""
    best, best_f, choice = BOTTOM, None, None
    pc = _popcount(len(table.bag))
    for ell in range(table.num_forgotten + 1):
        for S in range(1 << len(table.bag)):
            if not obj.valid(ell + int(pc[S])):
                continue
            cv = table.entry(ell, S)
            fv = evaluate_f(obj, cv)
            if best is BOTTOM or fv > best_f:
                best, best_f, choice = cv, fv, (ell, S)
    return (best, choice) if return_choice else best


def _build(i: int, ND: NiceTreeDecomposition, tables, G: WeightedDigraph, obj: Objective) -> DPTable:
    node = ND.nodes[i]
    kind = node.kind
    if kind is NodeKind.LEAF:
        return leaf_table(node.bag, G, obj, i)
    if kind is NodeKind.FORGET:
        return forget_table(tables[node.children[0]], node.vertex, obj, i)
    if kind is NodeKind.INTRODUCE:
        return introduce_table(tables[node.children[0]], node.vertex, node.bag, G, obj, i)
    j, k = node.children
    return join_table(tables[j], tables[k], node.bag, G, obj, i)


def compute_tables(G: WeightedDigraph, ND: NiceTreeDecomposition, obj: Objective, keep_all: bool = True) -> dict[int, DPTable]:
    """Sweep the decomposition bottom-up.

    With ``keep_all=False`` a child's table is dropped as soon as its parent
    is built and only the root table is returned.
    """
    tables: dict[int, DPTable] = {}
    for i, node in enumerate(ND.nodes):
        tables[i] = _build(i, ND, tables, G, obj)
        if not keep_all:
            for c in node.children:
                del tables[c]
    return tables


def check_counts(table: DPTable) -> bool:
    ell = np.arange(table.num_forgotten + 1)[:, None]
    return bool(np.array_equal(table.counts, ell + _popcount(len(table.bag))[None, :]))


def solve(
    G: WeightedDigraph,
    ND: NiceTreeDecomposition,
    obj: Objective,
    want_witness: bool = False,
    check: bool = False,
) -> SolveReport:
    """Compute the optimum (and optionally an optimal vertex set).

    ``check`` verifies the count identity on every table as it is built.
    """
    if ND.n != G.n or obj.n != G.n:
        raise ValueError("graph, decomposition and objective disagree on n")
    t0 = time.perf_counter()
    join_sum = ND.join_pair_sum()
    if join_sum > G.n * G.n:
        raise InternalInconsistency(f"join pair sum {join_sum} exceeds n^2 = {G.n * G.n}")
    tables: dict[int, DPTable] = {}
    for i, node in enumerate(ND.nodes):
        tables[i] = _build(i, ND, tables, G, obj)
        if check and not check_counts(tables[i]):
            raise InternalInconsistency(f"count identity fails at node {i}")
        if not want_witness:
            for c in node.children:
                del tables[c]
    phi, choice = root_aggregate(tables[ND.root], obj, return_choice=True)
    witness = None
    if want_witness and phi is not BOTTOM:
        witness = reconstruct_witness(tables, ND, G, obj, choice)
    elapsed = time.perf_counter() - t0
    stats = {
        "n": G.n,
        "m": G.m,
        "self_loops": G.self_loops,
        "width": ND.width,
        "nodes": ND.num_nodes,
        "node_kinds": ND.kind_counts(),
        "join_pair_sum": join_sum,
        "elapsed": elapsed,
    }
    return SolveReport(obj.name, report_value(obj, phi), phi, witness, stats)


def reconstruct_witness(tables, ND: NiceTreeDecomposition, G: WeightedDigraph, obj: Objective, root_choice) -> frozenset[int]:
    """Replay the recurrences top-down from the chosen root entry."""
    W: set[int] = set()
    stack = [(ND.root, *root_choice)]
    while stack:
        i, ell, S = stack.pop()
        node = ND.nodes[i]
        tab = tables[i]
        stored = tab.weights[ell, S]
        kind = node.kind
        if kind is NodeKind.LEAF:
            W |= tab.vertices(S)
        elif kind is NodeKind.INTRODUCE:
            p = node.bag.index(node.vertex)
            if S >> p & 1:
                W.add(node.vertex)
            stack.append((node.children[0], ell, int(_drop_bit(len(node.bag), p)[S])))
        elif kind is NodeKind.FORGET:
            child = tables[node.children[0]]
            p = child.bag.index(node.vertex)
            out_of, into = _insert_bit(len(node.bag), p)
            if ell >= 1 and child.weights[ell - 1, into[S]] == stored:
                stack.append((node.children[0], ell - 1, int(into[S])))
            elif ell <= child.num_forgotten and child.weights[ell, out_of[S]] == stored:
                stack.append((node.children[0], ell, int(out_of[S])))
            else:
                raise InternalInconsistency(f"forget node {i}: no operand reproduces entry ({ell}, {S})")
        else:
            j, k = node.children
            a, b = tables[j], tables[k]
            target = stored + _profile(node.bag, G)[S]
            for l1 in range(max(0, ell - b.num_forgotten), min(ell, a.num_forgotten) + 1):
                if a.weights[l1, S] + b.weights[ell - l1, S] == target:
                    stack.append((j, l1, S))
                    stack.append((k, ell - l1, S))
                    break
            else:
                raise InternalInconsistency(f"join node {i}: no split reproduces entry ({ell}, {S})")
    root = tables[ND.root].entry(*root_choice)
    if len(W) != root.count or cut_weight(G, W) != root.weight:
        raise InternalInconsistency("reconstructed set does not match the root entry")
    return frozenset(W)
