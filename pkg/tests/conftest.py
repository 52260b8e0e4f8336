from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from rolesim.graph import Graph
from rolesim.samples import family_graph

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def named(n: int, edges) -> Graph:
    return Graph.from_edges(n, edges)


def k2() -> Graph:
    return named(2, [(0, 1)])


def k3() -> Graph:
    return named(3, [(0, 1), (1, 2), (0, 2)])


def path3() -> Graph:
    # a=0 - b=1 - c=2
    return named(3, [(0, 1), (1, 2)])


def shared_neighbor() -> Graph:
    # a=0 and b=1 are both adjacent to exactly c=2, d=3, e=4
    return named(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])


def star(leaves: int) -> Graph:
    return named(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


@st.composite
def small_graphs(draw, min_nodes: int = 1, max_nodes: int = 8):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


@pytest.fixture(scope="session")
def family():
    g, names = family_graph()
    return g, {name: i for i, name in enumerate(names)}
