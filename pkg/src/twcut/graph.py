"""Weighted directed graphs and the cut-weight primitives used by the DP."""

from __future__ import annotations

import math
import re
from collections import defaultdict
from fractions import Fraction
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np

__all__ = [
    "GraphParseError",
    "WeightedDigraph",
    "parse_graph",
    "read_graph",
    "format_graph",
    "cut_weight",
    "incident_weight_sums",
    "to_rational",
]

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")

# Tables store integer multiples of 1/scale; beyond this bound we fall back to
# Python ints in object arrays.
_INT64_SAFE = 2**62


class GraphParseError(ValueError):
    """Raised for malformed graph files; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def to_rational(value) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Floats are read through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite weight {value!r}")
        return Fraction(repr(value))
    if isinstance(value, (np.integer,)):
        return Fraction(int(value))
    if isinstance(value, np.floating):
        return to_rational(float(value))
    return Fraction(value)


class WeightedDigraph:
    """Directed graph on vertices ``0..n-1`` with exact rational arc weights.

    Parallel arcs are merged by summing their weights and self-loops are
    dropped (they never cross a cut); the number dropped is kept in
    ``self_loops``. Instances are treated as immutable.

    Internally every weight is stored as an integer multiple of
    ``1 / scale`` where ``scale`` is the lcm of all denominators, which lets
    the DP run on integer numpy arrays without losing exactness.
    """

    def __init__(self, n: int, arcs: Iterable[tuple[int, int, object]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = int(n)
        merged: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        loops = 0
        for u, v, w in arcs:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"arc ({u}, {v}) outside vertex range 0..{n - 1}")
            w = to_rational(w)
            if u == v:
                loops += 1
                continue
            merged[u, v] += w
        self.self_loops = loops
        self.arcs: tuple[tuple[int, int, Fraction], ...] = tuple(
            (u, v, w) for (u, v), w in sorted(merged.items())
        )
        self.scale = math.lcm(1, *(w.denominator for _, _, w in self.arcs))
        total = sum(abs(w.numerator) * (self.scale // w.denominator) for _, _, w in self.arcs)
        # joins add two partial cuts before subtracting, hence the factor 3
        dtype = np.int64 if 3 * total < _INT64_SAFE else object
        mat = np.zeros((self.n, self.n), dtype=dtype)
        for u, v, w in self.arcs:
            mat[u, v] = w.numerator * (self.scale // w.denominator)
        mat.setflags(write=False)
        self.int_weights = mat

    @property
    def m(self) -> int:
        return len(self.arcs)

    @property
    def dtype(self):
        return self.int_weights.dtype

    def weight(self, u: int, v: int) -> Fraction:
        return Fraction(int(self.int_weights[u, v]), self.scale)

    @cached_property
    def weight_matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        """Dense n x n table of exact arc weights (0 where there is no arc)."""
        zero = Fraction(0)
        rows = [[zero] * self.n for _ in range(self.n)]
        for u, v, w in self.arcs:
            rows[u][v] = w
        return tuple(tuple(r) for r in rows)

    @cached_property
    def neighbours(self) -> tuple[frozenset[int], ...]:
        """Underlying undirected adjacency (arcs of weight 0 included)."""
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v, _ in self.arcs:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.int_weights, self.int_weights.T))

    def scaled(self, factor) -> "WeightedDigraph":
        factor = to_rational(factor)
        return WeightedDigraph(self.n, ((u, v, w * factor) for u, v, w in self.arcs))

    def relabeled(self, perm) -> "WeightedDigraph":
        """Copy with vertex ``v`` renamed to ``perm[v]``."""
        return WeightedDigraph(self.n, ((perm[u], perm[v], w) for u, v, w in self.arcs))

    def __eq__(self, other):
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.n, self.arcs))

    def __repr__(self):
        return f"WeightedDigraph(n={self.n}, m={self.m})"


def parse_graph(text: str | TextIO, directed: bool = False) -> WeightedDigraph:
    """Parse a PACE-style weighted graph.

    Format: ``c`` comment lines, one header ``p <n> <m>`` and ``m`` lines
    ``e <u> <v> <w>`` with 1-indexed endpoints and ``w`` an integer or
    ``p/q`` literal (omitted weights default to 1). In undirected mode each
    edge yields the two arcs ``u->v`` and ``v->u``.
    """
    lines = text.splitlines() if isinstance(text, str) else text.read().splitlines()
    n = m = None
    arcs: list[tuple[int, int, Fraction]] = []
    edge_lines = 0
    for lineno, raw in enumerate(lines, 1):
        parts = raw.split()
        if not parts or parts[0].startswith("c"):
            continue
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise GraphParseError("duplicate header", lineno)
            # accept the optional problem token used by PACE ("p tw n m")
            nums = parts[1:]
            if len(nums) == 3 and not nums[0].isdigit():
                nums = nums[1:]
            if len(nums) != 2 or not all(x.isdigit() for x in nums):
                raise GraphParseError(f"malformed header {raw.strip()!r}", lineno)
            n, m = int(nums[0]), int(nums[1])
        elif tag == "e":
            if n is None:
                raise GraphParseError("edge line before header", lineno)
            if len(parts) not in (3, 4):
                raise GraphParseError(f"malformed edge line {raw.strip()!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphParseError(f"non-integer endpoint in {raw.strip()!r}", lineno) from None
            for x in (u, v):
                if not 1 <= x <= n:
                    raise GraphParseError(f"vertex index {x} out of range 1..{n}", lineno)
            if len(parts) == 4:
                lit = parts[3]
                if not _RATIONAL.match(lit):
                    raise GraphParseError(f"non-rational weight {lit!r}", lineno)
                try:
                    w = Fraction(lit)
                except ZeroDivisionError:
                    raise GraphParseError(f"zero denominator in weight {lit!r}", lineno) from None
            else:
                w = Fraction(1)
            arcs.append((u - 1, v - 1, w))
            if not directed:
                arcs.append((v - 1, u - 1, w))
            edge_lines += 1
        else:
            raise GraphParseError(f"unknown line type {tag!r}", lineno)
    if n is None:
        raise GraphParseError("missing header 'p <n> <m>'")
    if edge_lines != m:
        raise GraphParseError(f"header declares {m} edges but {edge_lines} were given")
    return WeightedDigraph(n, arcs)


def read_graph(path, directed: bool = False) -> WeightedDigraph:
    with open(path) as fh:
        return parse_graph(fh, directed=directed)


def format_graph(G: WeightedDigraph, directed: bool = True) -> str:
    """Serialise ``G``; undirected output requires a symmetric weight matrix."""
    if directed:
        edges = list(G.arcs)
    else:
        if not G.is_symmetric():
            raise ValueError("graph is not symmetric; write it in directed mode")
        edges = [(u, v, w) for u, v, w in G.arcs if u < v]
    out = [f"p {G.n} {len(edges)}"]
    out += [f"e {u + 1} {v + 1} {w}" for u, v, w in edges]
    return "\n".join(out) + "\n"


def cut_weight(G: WeightedDigraph, S: Iterable[int]) -> Fraction:
    """Total weight of arcs leaving ``S``."""
    S = set(S)
    return sum((w for u, v, w in G.arcs if u in S and v not in S), Fraction(0))


def incident_weight_sums(G: WeightedDigraph, v: int, T: Iterable[int]) -> tuple[Fraction, Fraction]:
    """Weights of arcs ``v -> T`` and ``T -> v``, by adjacency-matrix lookup."""
    T = list(T)
    W = G.int_weights
    out_sum = sum(int(W[v, x]) for x in T)
    in_sum = sum(int(W[x, v]) for x in T)
    return Fraction(out_sum, G.scale), Fraction(in_sum, G.scale)
