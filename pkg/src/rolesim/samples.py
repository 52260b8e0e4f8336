"""Small named graphs used in examples, tests and the CLI."""

from __future__ import annotations

from .graph import Graph

FAMILY_NAMES = [
    "S1", "S2", "S3", "S4",
    "J1", "J2", "J3", "J4",
    "L1", "L2", "L3", "L4", "L5",
]

_FAMILY_EDGES = [
    ("S1", "J1"), ("S1", "L1"), ("J1", "L1"),
    ("S1", "S2"), ("J1", "J2"), ("L1", "L2"),
    ("S3", "S1"), ("S3", "S2"), ("S4", "S1"), ("S4", "S2"),
    ("J3", "J1"), ("J3", "J2"), ("J4", "J1"), ("J4", "J2"),
    ("L3", "L1"), ("L3", "L2"), ("L4", "L1"), ("L4", "L2"), ("L5", "L1"), ("L5", "L2"),
]


def family_graph() -> tuple[Graph, list[str]]:
    """Three two-parent families whose first parents are mutual friends.

    Returns the graph and the node names indexed by node id.
    """
    idx = {name: i for i, name in enumerate(FAMILY_NAMES)}
    edges = [(idx[a], idx[b]) for a, b in _FAMILY_EDGES]
    return Graph.from_edges(len(FAMILY_NAMES), edges), list(FAMILY_NAMES)
