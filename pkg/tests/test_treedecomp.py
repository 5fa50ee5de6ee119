import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twcut.graph import WeightedDigraph
from twcut.instances import random_instance
from twcut.treedecomp import (
    CoherenceError,
    DecompositionError,
    NiceNode,
    NiceTreeDecomposition,
    NodeKind,
    NotSmallError,
    TDParseError,
    TreeDecomposition,
    annotate_forgotten,
    bits_to_set,
    format_td,
    greedy_decomposition,
    nicify,
    parse_td,
    shrink,
    smooth,
    validate,
)

from conftest import A, B, C, undirected

L, I, F, J = NodeKind.LEAF, NodeKind.INTRODUCE, NodeKind.FORGET, NodeKind.JOIN


def star_nice():
    """Cherry a - c - b split at a join over {c}."""
    nodes = [
        NiceNode(L, (A, C)),
        NiceNode(F, (C,), (0,), A),
        NiceNode(L, (B, C)),
        NiceNode(F, (C,), (2,), B),
        NiceNode(J, (C,), (1, 3)),
    ]
    return NiceTreeDecomposition(nodes, 3)


class TestValidate:
    def test_valid_path(self, p3):
        D = TreeDecomposition([{A, B}, {B, C}], [(0, 1)])
        assert validate(p3, D) is None

    def test_edge_not_covered(self, p3):
        D = TreeDecomposition([{A}, {B}, {C}], [(0, 1), (1, 2)])
        v = validate(p3, D)
        assert v.kind == "EdgeNotCovered"
        assert v.witness == (A, B)
        assert v.describe() == "EdgeNotCovered: edge (1, 2)"

    def test_node_not_covered(self):
        G = WeightedDigraph(3, [])
        v = validate(G, TreeDecomposition([{0}, {1}], [(0, 1)]))
        assert (v.kind, v.witness) == ("NodeNotCovered", (2,))

    def test_vertex_outside_graph(self):
        G = WeightedDigraph(1, [])
        assert validate(G, TreeDecomposition([{0, 4}])).kind == "NodeNotCovered"

    def test_coherence_broken(self, p3):
        D = TreeDecomposition([{A, B}, {C}, {B, C}], [(0, 1), (1, 2)])
        v = validate(p3, D)
        assert (v.kind, v.witness) == ("CoherenceBroken", (B,))

    @pytest.mark.parametrize(
        "edges",
        [[(0, 1)], [(0, 1), (1, 2), (2, 0)], [(0, 1), (0, 5)], [(1, 1), (0, 2)]],
    )
    def test_not_a_tree(self, edges):
        D = TreeDecomposition([{0}, {0}, {0}], edges)
        assert validate(WeightedDigraph(1, []), D).kind == "NotATree"

    def test_checks_run_in_order(self):
        # both uncovered vertex and uncovered edge; the vertex is reported
        G = undirected(3, [(0, 1)])
        assert validate(G, TreeDecomposition([{0}, {1}], [(0, 1)])).kind == "NodeNotCovered"


def test_shrink_merges_contained_bags():
    D = TreeDecomposition([{A, B}, {B}, {B, C}], [(0, 1), (1, 2)])
    S = shrink(D)
    assert S.num_nodes == 2
    assert sorted(map(sorted, S.bags)) == [[A, B], [B, C]]
    assert S.width == D.width


def test_shrink_keeps_root_bag_and_is_idempotent():
    D = TreeDecomposition([{0}, {0, 1}, {1, 2}], [(0, 1), (1, 2)], root=1)
    S = shrink(D)
    assert S.bags[S.root] == D.bags[1]
    again = shrink(S)
    assert again.bags == S.bags and again.edges == S.edges


def test_bits_to_set():
    assert bits_to_set(0) == frozenset()
    assert bits_to_set(0b101001) == {0, 3, 5}


class TestNiceDecomposition:
    def test_star_annotation(self):
        ND = star_nice()
        assert ND.forgotten_set(4) == {A, B}
        assert ND.y_sizes[4] == 3
        assert ND.join_pairs() == [(4, 1 << A, 1 << B)]
        assert ND.join_pair_sum() == 1
        assert ND.kind_counts() == {"leaf": 2, "introduce": 0, "forget": 2, "join": 1}

    def test_y_includes_own_bag(self):
        ann = annotate_forgotten(star_nice().nodes)
        for F_mask, Y in ann:
            assert Y >= 1
        assert ann[0] == (0, 2)
        assert ann[1] == (1 << A, 2)

    def test_join_overlap_is_incoherent(self):
        nodes = [
            NiceNode(L, (A, C)),
            NiceNode(F, (C,), (0,), A),
            NiceNode(L, (A, C)),
            NiceNode(F, (C,), (2,), A),
            NiceNode(J, (C,), (1, 3)),
        ]
        with pytest.raises(CoherenceError):
            annotate_forgotten(nodes)

    def test_reintroduce_is_incoherent(self):
        nodes = [NiceNode(L, (A, B)), NiceNode(F, (B,), (0,), A), NiceNode(I, (A, B), (1,), A)]
        with pytest.raises(CoherenceError):
            annotate_forgotten(nodes)

    @pytest.mark.parametrize(
        "nodes",
        [
            [NiceNode(L, (A,)), NiceNode(I, (A, B), (0,), C)],
            [NiceNode(L, (A, B)), NiceNode(F, (A, B), (0,), A)],
            [NiceNode(L, (A,)), NiceNode(L, (B,)), NiceNode(J, (A,), (0, 1))],
            [NiceNode(I, (A,), (1,), A), NiceNode(L, ())],
            [NiceNode(L, (B, A))],
        ],
    )
    def test_bad_shapes_rejected(self, nodes):
        with pytest.raises(DecompositionError):
            NiceTreeDecomposition(nodes, 2)

    def test_root_must_see_every_vertex(self):
        with pytest.raises(DecompositionError):
            NiceTreeDecomposition([NiceNode(L, (A,))], 2)

    def test_as_tree_decomposition_validates(self, cherry):
        assert validate(cherry, star_nice().as_tree_decomposition()) is None


def _is_valid_nice(ND, G, D):
    TD = ND.as_tree_decomposition()
    return validate(G, TD) is None and ND.width == D.width and ND.num_nodes <= 4 * max(G.n, 1)


def test_nicify_path_shapes(p3):
    D = TreeDecomposition([{B, C}, {A, B}], [(0, 1)])
    ND = nicify(D, p3)
    assert _is_valid_nice(ND, p3, D)
    kinds = [x.kind for x in ND.nodes]
    assert kinds == [L, F, I]
    assert ND.nodes[0].bag == (A, B)


def test_nicify_equal_bags_join_directly():
    G = WeightedDigraph(5, [])
    D = TreeDecomposition([{0, 1}, {0, 2}, {0, 3}, {0, 4}], [(0, 1), (0, 2), (0, 3)])
    ND = nicify(D, G)
    assert ND.kind_counts() == {"leaf": 3, "introduce": 1, "forget": 3, "join": 2}
    assert _is_valid_nice(ND, G, D)


def _smooth_shape(S, n):
    size = S.width + 1
    assert all(len(b) == size for b in S.bags)
    for c, p in enumerate(S.parent):
        if p is not None:
            assert len(S.bags[c] - S.bags[p]) == 1
    assert S.num_nodes == n - S.width


def test_smooth_pads_and_splits():
    G = undirected(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2)])
    D = TreeDecomposition([{0, 1, 2}, {2, 3}, {3, 4, 5}, {4}], [(0, 1), (1, 2), (2, 3)])
    S = smooth(D)
    assert validate(G, S) is None
    assert S.width == 2
    _smooth_shape(S, 6)


def test_smooth_inserts_swap_chain():
    G = WeightedDigraph(6, [])
    S = smooth(TreeDecomposition([{0, 1, 2}, {3, 4, 5}], [(0, 1)]))
    assert validate(G, S) is None
    _smooth_shape(S, 6)


def test_nicify_rejects_unshrunk_input():
    G = WeightedDigraph(1, [])
    D = TreeDecomposition([{0}] * 9, [(i, i + 1) for i in range(8)])
    with pytest.raises(NotSmallError):
        nicify(D, G)
    assert nicify(shrink(D), G).num_nodes == 1


def test_nicify_random_instances():
    for seed in range(300):
        rng = random.Random(seed)
        n = rng.randint(1, 40)
        G, D = random_instance(seed, n, rng.randint(0, min(5, n - 1)), directed=seed % 2 == 1)
        _smooth_shape(smooth(D), n)
        S = shrink(D)
        assert S.num_nodes <= n + 1
        ND = nicify(S, G)
        assert _is_valid_nice(ND, G, D)
        assert ND.join_pair_sum() <= n * n
        assert len(set(ND.join_pairs())) == len(ND.join_pairs())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 60), st.floats(0.05, 1.0))
def test_greedy_then_nicify_valid(seed, n, p):
    g = nx.gnp_random_graph(n, p, seed=seed)
    G = undirected(n, list(g.edges))
    D = greedy_decomposition(G)
    assert validate(G, D) is None
    assert D.num_nodes <= n + 1
    _smooth_shape(smooth(D), n)
    ND = nicify(D, G)
    assert _is_valid_nice(ND, G, D)


@pytest.mark.parametrize(
    "graph, width",
    [
        (WeightedDigraph(5, []), 0),
        (undirected(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]), 1),
        (undirected(4, [(u, v) for u in range(4) for v in range(u + 1, 4)]), 3),
    ],
)
def test_greedy_widths(graph, width):
    assert greedy_decomposition(graph).width == width


class TestTDFormat:
    text = "c comment\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n"

    def test_parse(self):
        D = parse_td(self.text, n=3)
        assert D.bags == (frozenset({0, 1}), frozenset({1, 2}))
        assert D.edges == ((0, 1),)
        assert D.root == 0

    def test_root_selection(self):
        assert parse_td(self.text, root=2).root == 1
        with pytest.raises(TDParseError):
            parse_td(self.text, root=3)

    def test_roundtrip(self, p3):
        D = parse_td(self.text)
        again = parse_td(format_td(D, 3, ["first", ""]))
        assert again.bags == D.bags and again.edges == D.edges

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("b 1 1\n", "missing"),
            ("s td 1 1 2\ns td 1 1 2\nb 1 1\n", "duplicate"),
            ("s td 1 1\nb 1 1\n", "malformed header"),
            ("s td 1 1 2\nb 2 1\n", "out of range"),
            ("s td 1 1 2\nb 1 3\n", "vertex index"),
            ("s td 1 1 2\nb 1 1 2\n", "larger than"),
            ("s td 2 1 2\nb 1 1\nb 2 2\n1 3\n", "unknown bag"),
            ("s td 2 1 2\nb 1 1\nb 2 2\n1\n", "malformed tree edge"),
            ("s td 2 1 2\nb 1 1\n", "not defined"),
            ("s td 1 1 2\nb 1 1\nb 1 2\n", "defined twice"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(TDParseError, match=fragment):
            parse_td(text)

    def test_vertex_count_mismatch(self):
        with pytest.raises(TDParseError):
            parse_td(self.text, n=4)
