"""Seeded random instances that come with a valid tree decomposition."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

from .graph import WeightedDigraph, to_rational
from .treedecomp import TreeDecomposition

__all__ = ["random_instance"]


def _random_weight(rng: random.Random, lo: Fraction, hi: Fraction) -> Fraction:
    d = rng.choice((1, 1, 2, 3))
    a, b = math.ceil(lo * d), math.floor(hi * d)
    if a > b:
        return lo
    return Fraction(rng.randint(a, b), d)


def random_instance(
    seed: int,
    n: int,
    max_width: int,
    arc_density: float = 0.6,
    weight_range=(0, 5),
    directed: bool = False,
    redundant: float = 0.15,
) -> tuple[WeightedDigraph, TreeDecomposition]:
    """Grow a random tree of bags, then draw arcs inside bags only.

    Every new node copies part of a random earlier bag and adds fresh
    vertices, so each vertex occupies a connected set of nodes. With
    probability ``redundant`` a node only copies a subset of its parent,
    which leaves work for :func:`~twcut.treedecomp.shrink`. Weights are
    rationals with denominator 1, 2 or 3 inside ``weight_range``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= max_width < n:
        raise ValueError("need 0 <= max_width < n")
    rng = random.Random(seed)
    lo, hi = (to_rational(x) for x in weight_range)
    labels = list(range(n))
    rng.shuffle(labels)
    pos = 0

    def fresh(k):
        nonlocal pos
        out = labels[pos : pos + k]
        pos += k
        return out

    cap = max_width + 1
    bags: list[frozenset[int]] = [frozenset(fresh(rng.randint(1, min(cap, n))))]
    edges: list[tuple[int, int]] = []
    while pos < n:
        p = rng.randrange(len(bags))
        parent = sorted(bags[p])
        if rng.random() < redundant:
            child = frozenset(rng.sample(parent, rng.randint(0, len(parent))))
        else:
            new = rng.randint(1, min(cap, n - pos))
            keep = min(rng.randint(0, cap - new), len(parent))
            child = frozenset(rng.sample(parent, keep)) | frozenset(fresh(new))
        edges.append((p, len(bags)))
        bags.append(child)

    pairs = set()
    for bag in bags:
        pairs.update(combinations(sorted(bag), 2))
    arcs = []
    for u, v in sorted(pairs):
        if directed:
            for a, b in ((u, v), (v, u)):
                if rng.random() < arc_density:
                    arcs.append((a, b, _random_weight(rng, lo, hi)))
        elif rng.random() < arc_density:
            w = _random_weight(rng, lo, hi)
            arcs += [(u, v, w), (v, u, w)]
    root = rng.randrange(len(bags))
    return WeightedDigraph(n, arcs), TreeDecomposition(bags, edges, root)
