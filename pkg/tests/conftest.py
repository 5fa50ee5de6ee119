from fractions import Fraction
from itertools import combinations

import pytest

from twcut.graph import WeightedDigraph, cut_weight
from twcut.objectives import PROBLEMS, make_objective

# vertex names used in the hand-worked examples
A, B, C, X, Y, Z = 0, 1, 2, 3, 4, 5


def undirected(n, edges):
    arcs = []
    for u, v, *w in edges:
        w = w[0] if w else 1
        arcs += [(u, v, w), (v, u, w)]
    return WeightedDigraph(n, arcs)


def all_subsets(n):
    for k in range(n + 1):
        yield from (frozenset(s) for s in combinations(range(n), k))


def objective_for(problem, n, beta=Fraction(1, 3)):
    return make_objective(problem, n, beta=beta if problem == "balanced-min-cut" else None)


@pytest.fixture
def p3():
    """Path a - b - c with unit weights."""
    return undirected(3, [(A, B), (B, C)])


@pytest.fixture
def star():
    """K1,3 with centre c = 0 and leaves 1, 2, 3."""
    return undirected(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def cherry():
    """K1,3 minus one leaf: centre c, leaves a and b (a - c - b)."""
    return undirected(3, [(A, C), (B, C)])


@pytest.fixture(params=PROBLEMS)
def problem(request):
    return request.param


def brute_cut(G, S):
    return cut_weight(G, S)


# criterion -> (passed, detail), filled in by test_acceptance
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
