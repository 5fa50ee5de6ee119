"""Tree decompositions: validation, shrinking, nicification and annotation.

Nice decompositions store their nodes in post-order (children before
parents, root last) so the DP can sweep them with a plain loop. Forgotten
sets are kept as integer bit vectors over the vertex ids.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_degree

from .graph import WeightedDigraph

__all__ = [
    "DecompositionError",
    "NotSmallError",
    "CoherenceError",
    "TDParseError",
    "Violation",
    "TreeDecomposition",
    "NodeKind",
    "NiceNode",
    "NiceTreeDecomposition",
    "validate",
    "shrink",
    "smooth",
    "nicify",
    "annotate_forgotten",
    "parse_td",
    "read_td",
    "format_td",
    "greedy_decomposition",
    "bits_to_set",
]


class DecompositionError(ValueError):
    pass


class NotSmallError(DecompositionError):
    pass


class CoherenceError(DecompositionError):
    pass


class TDParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def bits_to_set(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


@dataclass(frozen=True)
class Violation:
    """First failed tree-decomposition property, with a witness.

    ``kind`` is one of ``NodeNotCovered``, ``EdgeNotCovered``,
    ``CoherenceBroken`` or ``NotATree``. Vertex witnesses are 0-indexed.
    """

    kind: str
    witness: tuple
    detail: str = ""

    def describe(self, one_indexed: bool = True) -> str:
        off = 1 if one_indexed else 0
        if self.kind in ("NodeNotCovered", "CoherenceBroken"):
            w = f"vertex {self.witness[0] + off}"
        elif self.kind == "EdgeNotCovered":
            w = f"edge ({self.witness[0] + off}, {self.witness[1] + off})"
        else:
            w = ", ".join(str(x + off) for x in self.witness) if self.witness else ""
            w = f"bags {w}" if w else ""
        text = f"{self.kind}: {w}" if w else self.kind
        return f"{text} ({self.detail})" if self.detail else text

    def __str__(self):
        return self.describe()


class TreeDecomposition:
    """Rooted tree of bags. Node ids are ``0..len(bags)-1``."""

    def __init__(self, bags: Iterable[Iterable[int]], edges: Iterable[tuple[int, int]] = (), root: int = 0):
        self.bags: tuple[frozenset[int], ...] = tuple(frozenset(int(v) for v in b) for b in bags)
        self.edges: tuple[tuple[int, int], ...] = tuple((int(a), int(b)) for a, b in edges)
        if not self.bags:
            raise DecompositionError("a decomposition needs at least one bag")
        if not 0 <= root < len(self.bags):
            raise DecompositionError(f"root {root} is not a node")
        self.root = int(root)

    @property
    def num_nodes(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    def tree_problem(self) -> tuple[int, ...] | None:
        """Return a witness if the node graph is not a tree, else ``None``."""
        N = self.num_nodes
        for a, b in self.edges:
            if not (0 <= a < N and 0 <= b < N) or a == b:
                return (a, b)
        if len(self.edges) != N - 1:
            return ()
        seen = {self.root}
        stack = [self.root]
        adj = self._adjacency
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != N:
            return (min(set(range(N)) - seen),)
        return None

    @cached_property
    def _adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.edges:
            if 0 <= a < len(adj) and 0 <= b < len(adj):
                adj[a].append(b)
                adj[b].append(a)
        return adj

    @cached_property
    def parent(self) -> tuple[int | None, ...]:
        if self.tree_problem() is not None:
            raise DecompositionError("bag graph is not a tree")
        par: list[int | None] = [None] * self.num_nodes
        seen = {self.root}
        stack = [self.root]
        while stack:
            i = stack.pop()
            for j in sorted(self._adjacency[i]):
                if j not in seen:
                    seen.add(j)
                    par[j] = i
                    stack.append(j)
        return tuple(par)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in self.bags]
        for j, p in enumerate(self.parent):
            if p is not None:
                kids[p].append(j)
        return tuple(tuple(k) for k in kids)

    def postorder(self) -> list[int]:
        order = []
        stack = [self.root]
        while stack:
            i = stack.pop()
            order.append(i)
            stack.extend(self.children[i])
        order.reverse()
        return order

    def __repr__(self):
        return f"TreeDecomposition(nodes={self.num_nodes}, width={self.width}, root={self.root})"


def validate(G: WeightedDigraph, D: TreeDecomposition) -> Violation | None:
    """Check ``D`` against ``G``; return the first violation or ``None``."""
    bad = D.tree_problem()
    if bad is not None:
        return Violation("NotATree", bad)
    nodes_of: list[set[int]] = [set() for _ in range(G.n)]
    for i, bag in enumerate(D.bags):
        for v in bag:
            if not 0 <= v < G.n:
                return Violation("NodeNotCovered", (v,), f"bag {i + 1} holds a vertex outside the graph")
            nodes_of[v].add(i)
    for v in range(G.n):
        if not nodes_of[v]:
            return Violation("NodeNotCovered", (v,))
    for u, v, _ in G.arcs:
        if not nodes_of[u] & nodes_of[v]:
            return Violation("EdgeNotCovered", (min(u, v), max(u, v)))
    par = D.parent
    for v in range(G.n):
        tops = sum(1 for i in nodes_of[v] if par[i] is None or par[i] not in nodes_of[v])
        if tops != 1:
            return Violation("CoherenceBroken", (v,))
    return None


def shrink(D: TreeDecomposition) -> TreeDecomposition:
    """Merge every child whose bag is contained in its parent's bag.

    The surviving decomposition has a vertex disappearing on every tree
    edge, so it has at most ``n + 1`` nodes.
    """
    kids = D.children
    bags = [D.bags[D.root]]
    edges = []
    new_id = {D.root: 0}
    stack = [D.root]
    while stack:
        i = stack.pop()
        pending = list(reversed(kids[i]))
        while pending:
            c = pending.pop()
            if D.bags[c] <= D.bags[i]:
                pending.extend(reversed(kids[c]))
                continue
            new_id[c] = len(bags)
            bags.append(D.bags[c])
            edges.append((new_id[i], new_id[c]))
            stack.append(c)
    return TreeDecomposition(bags, edges, 0)


def smooth(D: TreeDecomposition) -> TreeDecomposition:
    """Equivalent decomposition whose bags all have ``width + 1`` vertices
    and whose adjacent bags differ in exactly one vertex each way.

    Such a decomposition of an ``n``-vertex graph has ``n - width`` nodes,
    which is what keeps the nice form linear in ``n``.
    """
    D = shrink(D)
    size = D.width + 1
    bags = [set(b) for b in D.bags]
    # pad outwards from a full bag; a vertex borrowed from a neighbour
    # keeps its subtree connected
    start = next(i for i, b in enumerate(bags) if len(b) == size)
    adj = D._adjacency
    seen, stack = {start}, [start]
    while stack:
        p = stack.pop()
        for c in adj[p]:
            if c not in seen:
                seen.add(c)
                bags[c].update(sorted(bags[p] - bags[c])[: size - len(bags[c])])
                stack.append(c)
    D = shrink(TreeDecomposition(bags, D.edges, D.root))
    new_bags = list(D.bags)
    edges = []
    for c in range(D.num_nodes):
        p = D.parent[c]
        if p is None:
            continue
        out = sorted(D.bags[p] - D.bags[c])
        into = sorted(D.bags[c] - D.bags[p])
        prev, bag = p, set(D.bags[p])
        for a, b in zip(out[:-1], into[:-1]):
            bag.discard(a)
            bag.add(b)
            new_bags.append(frozenset(bag))
            edges.append((prev, len(new_bags) - 1))
            prev = len(new_bags) - 1
        edges.append((prev, c))
    return TreeDecomposition(new_bags, edges, D.root)


class NodeKind(str, enum.Enum):
    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"


@dataclass(frozen=True)
class NiceNode:
    kind: NodeKind
    bag: tuple[int, ...]
    children: tuple[int, ...] = ()
    vertex: int | None = None


def _check_nice_node(i: int, node: NiceNode, nodes: Sequence[NiceNode]) -> None:
    kids = node.children
    if any(c >= i for c in kids):
        raise DecompositionError(f"node {i}: children must precede their parent")
    if list(node.bag) != sorted(set(node.bag)):
        raise DecompositionError(f"node {i}: bag must be sorted and duplicate-free")
    bag = set(node.bag)
    kind = node.kind
    if kind is NodeKind.LEAF:
        ok = not kids
    elif kind is NodeKind.INTRODUCE:
        ok = len(kids) == 1 and node.vertex in bag and set(nodes[kids[0]].bag) == bag - {node.vertex}
    elif kind is NodeKind.FORGET:
        ok = len(kids) == 1 and node.vertex not in bag and set(nodes[kids[0]].bag) == bag | {node.vertex}
    elif kind is NodeKind.JOIN:
        ok = len(kids) == 2 and kids[0] != kids[1] and all(set(nodes[c].bag) == bag for c in kids)
    else:
        ok = False
    if not ok:
        raise DecompositionError(f"node {i} does not satisfy the {kind} shape")


def annotate_forgotten(nodes) -> list[tuple[int, int]]:
    """Bottom-up ``(F_i, |Y_i|)`` per node, with ``F_i`` as a vertex bitmask.

    ``Y_i`` counts the bag of ``i`` itself, so ``|F_i| + |X_i| = |Y_i|``.
    Raises CoherenceError if a join's children forgot a common vertex or an
    introduced vertex was already forgotten below.
    """
    if isinstance(nodes, NiceTreeDecomposition):
        nodes = nodes.nodes
    out: list[tuple[int, int]] = []
    for i, node in enumerate(nodes):
        kind = node.kind
        if kind is NodeKind.LEAF:
            F, Y = 0, len(node.bag)
        elif kind is NodeKind.INTRODUCE:
            F, Y = out[node.children[0]]
            if F >> node.vertex & 1:
                raise CoherenceError(f"node {i} re-introduces forgotten vertex {node.vertex}")
            Y += 1
        elif kind is NodeKind.FORGET:
            F, Y = out[node.children[0]]
            F |= 1 << node.vertex
        else:
            Fj, _ = out[node.children[0]]
            Fk, _ = out[node.children[1]]
            if Fj & Fk:
                raise CoherenceError(f"join node {i}: children share forgotten vertices")
            F = Fj | Fk
            Y = F.bit_count() + len(node.bag)
        out.append((F, Y))
    return out


class NiceTreeDecomposition:
    """Nice tree decomposition in post-order; the root is the last node."""

    def __init__(self, nodes: Sequence[NiceNode], n: int):
        self.nodes: tuple[NiceNode, ...] = tuple(nodes)
        if not self.nodes:
            raise DecompositionError("empty decomposition")
        self.n = n
        for i, node in enumerate(self.nodes):
            _check_nice_node(i, node, self.nodes)
        ann = annotate_forgotten(self.nodes)
        self.forgotten: tuple[int, ...] = tuple(F for F, _ in ann)
        self.y_sizes: tuple[int, ...] = tuple(Y for _, Y in ann)
        if self.y_sizes[-1] != n:
            raise DecompositionError("root does not see every vertex")
        parents = [None] * len(self.nodes)
        for i, node in enumerate(self.nodes):
            for c in node.children:
                if parents[c] is not None:
                    raise DecompositionError(f"node {c} has two parents")
                parents[c] = i
        if any(p is None for p in parents[:-1]):
            raise DecompositionError("nodes not connected to the root")

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def width(self) -> int:
        return max(len(x.bag) for x in self.nodes) - 1

    def forgotten_set(self, i: int) -> frozenset[int]:
        return bits_to_set(self.forgotten[i])

    def num_forgotten(self, i: int) -> int:
        return self.forgotten[i].bit_count()

    def kind_counts(self) -> dict[str, int]:
        counts = {k.value: 0 for k in NodeKind}
        for node in self.nodes:
            counts[node.kind.value] += 1
        return counts

    def join_pairs(self) -> list[tuple[int, int, int]]:
        """``(node, F_left, F_right)`` for every join node."""
        return [
            (i, self.forgotten[x.children[0]], self.forgotten[x.children[1]])
            for i, x in enumerate(self.nodes)
            if x.kind is NodeKind.JOIN
        ]

    def join_pair_sum(self) -> int:
        return sum(a.bit_count() * b.bit_count() for _, a, b in self.join_pairs())

    def as_tree_decomposition(self) -> TreeDecomposition:
        edges = [(i, c) for i, x in enumerate(self.nodes) for c in x.children]
        return TreeDecomposition([x.bag for x in self.nodes], edges, self.root)

    def __repr__(self):
        return f"NiceTreeDecomposition(nodes={self.num_nodes}, width={self.width}, n={self.n})"


def nicify(D: TreeDecomposition, G: WeightedDigraph) -> NiceTreeDecomposition:
    """Convert a small decomposition into a nice one of the same width.

    The input is smoothed first. Each child branch then forgets the one
    vertex its parent lacks. Branches with equal bags are joined directly,
    distinct groups are joined over the parent's bag after introducing the
    missing vertex, and leaves keep their whole bag. That is at most one
    forget and one introduce per tree edge.
    """
    if D.num_nodes > 4 * (G.n + 1):
        raise NotSmallError(f"{D.num_nodes} nodes exceeds 4(n+1) = {4 * (G.n + 1)}; shrink first")
    D = smooth(D)
    nodes: list[NiceNode] = []

    def add(kind, bag, children=(), vertex=None) -> int:
        nodes.append(NiceNode(kind, tuple(sorted(bag)), tuple(children), vertex))
        return len(nodes) - 1

    def lift(top: int, target: frozenset[int]) -> int:
        bag = set(nodes[top].bag)
        for v in sorted(bag - target):
            bag.discard(v)
            top = add(NodeKind.FORGET, bag, (top,), v)
        for v in sorted(target - bag):
            bag.add(v)
            top = add(NodeKind.INTRODUCE, bag, (top,), v)
        return top

    top_of: dict[int, int] = {}
    for i in D.postorder():
        B = D.bags[i]
        kids = D.children[i]
        if not kids:
            top_of[i] = add(NodeKind.LEAF, B)
            continue
        # branches with equal bags join for free; distinct groups are then
        # merged smallest first so few vertices need introducing
        groups: dict[tuple[int, ...], int] = {}
        for c in kids:
            b = lift(top_of[c], D.bags[c] & B)
            key = nodes[b].bag
            groups[key] = add(NodeKind.JOIN, key, (groups[key], b)) if key in groups else b
        order = sorted(groups, key=lambda bag: (len(bag), bag))
        acc = groups[order[0]]
        for key in order[1:]:
            b = groups[key]
            union = frozenset(nodes[acc].bag) | frozenset(key)
            acc = lift(acc, union)
            b = lift(b, union)
            acc = add(NodeKind.JOIN, union, (acc, b))
        top_of[i] = lift(acc, B)
    assert top_of[D.root] == len(nodes) - 1
    return NiceTreeDecomposition(nodes, G.n)


def parse_td(text: str | TextIO, n: int | None = None, root: int | None = None) -> TreeDecomposition:
    """Parse a PACE 2017 ``.td`` file.

    ``root`` is a 1-based bag id (default: bag 1). When ``n`` is given the
    header's vertex count must match it.
    """
    lines = text.splitlines() if isinstance(text, str) else text.read().splitlines()
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(lines, 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "s":
            if header is not None:
                raise TDParseError("duplicate 's td' header", lineno)
            if len(parts) != 5 or parts[1] != "td" or not all(p.isdigit() for p in parts[2:]):
                raise TDParseError(f"malformed header {raw.strip()!r}", lineno)
            header = tuple(int(p) for p in parts[2:])
            if n is not None and header[2] != n:
                raise TDParseError(f"decomposition is for {header[2]} vertices, graph has {n}", lineno)
            continue
        if header is None:
            raise TDParseError("missing 's td' header", lineno)
        nbags, size, nv = header
        if parts[0] == "b":
            try:
                nums = [int(p) for p in parts[1:]]
            except ValueError:
                raise TDParseError(f"malformed bag line {raw.strip()!r}", lineno) from None
            if not nums:
                raise TDParseError("bag line without id", lineno)
            bid, verts = nums[0], nums[1:]
            if not 1 <= bid <= nbags:
                raise TDParseError(f"bag id {bid} out of range 1..{nbags}", lineno)
            if bid in bags:
                raise TDParseError(f"bag {bid} defined twice", lineno)
            for v in verts:
                if not 1 <= v <= nv:
                    raise TDParseError(f"vertex index {v} out of range 1..{nv}", lineno)
            if len(set(verts)) > size:
                raise TDParseError(f"bag {bid} larger than declared size {size}", lineno)
            bags[bid] = frozenset(v - 1 for v in verts)
        else:
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise TDParseError(f"malformed tree edge {raw.strip()!r}", lineno)
            a, b = int(parts[0]), int(parts[1])
            for x in (a, b):
                if not 1 <= x <= nbags:
                    raise TDParseError(f"tree edge references unknown bag {x}", lineno)
            edges.append((a - 1, b - 1))
    if header is None:
        raise TDParseError("missing 's td' header")
    missing = set(range(1, header[0] + 1)) - set(bags)
    if missing:
        raise TDParseError(f"bags declared but not defined: {sorted(missing)[:5]}")
    r = 0 if root is None else root - 1
    if not 0 <= r < header[0]:
        raise TDParseError(f"root bag {root} does not exist")
    return TreeDecomposition([bags[i] for i in range(1, header[0] + 1)], edges, r)


def read_td(path, n: int | None = None, root: int | None = None) -> TreeDecomposition:
    with open(path) as fh:
        return parse_td(fh, n=n, root=root)


def format_td(D: TreeDecomposition, n: int, notes: Sequence[str] | None = None) -> str:
    """Serialise in ``.td`` form; ``notes[i]`` becomes a comment before bag i."""
    out = [f"s td {D.num_nodes} {D.width + 1} {n}"]
    for i, bag in enumerate(D.bags):
        if notes is not None and notes[i]:
            out.append(f"c {notes[i]}")
        out.append(" ".join(["b", str(i + 1), *(str(v + 1) for v in sorted(bag))]))
    out += [f"{a + 1} {b + 1}" for a, b in D.edges]
    return "\n".join(out) + "\n"


def greedy_decomposition(G: WeightedDigraph) -> TreeDecomposition:
    """Min-degree elimination decomposition, shrunk before returning."""
    if G.n == 0:
        return TreeDecomposition([()])
    g = nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from((u, v) for u, v, _ in G.arcs)
    _, tree = treewidth_min_degree(g)
    bags = sorted(tree.nodes, key=lambda b: (-len(b), sorted(b)))
    index = {b: i for i, b in enumerate(bags)}
    edges = [(index[a], index[b]) for a, b in tree.edges]
    # bags of separate components may come back as a forest
    comps = [min(index[b] for b in comp) for comp in nx.connected_components(tree)]
    comps.sort()
    edges += list(zip(comps, comps[1:]))
    covered = frozenset().union(*bags)
    extra = [frozenset([v]) for v in range(G.n) if v not in covered]
    for b in extra:
        edges.append((0, len(bags)))
        bags.append(b)
    return shrink(TreeDecomposition(bags, edges, 0))
