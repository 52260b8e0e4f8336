"""Role-equivalence partitions: structural classes, spectrum refinement, orbits.

Refinement repeatedly splits classes whose members see different neighbor
spectra. ``COUNTED`` compares how many neighbors fall in each class and
converges to the coarsest equitable partition; ``BINARY`` compares only which
classes are present and converges to a regular-equivalence partition.

Automorphism orbits are found by exhaustive backtracking. This is exponential
and only meant as a ground-truth oracle on small graphs.
"""

from __future__ import annotations

import logging
import warnings
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, Partition

logger = logging.getLogger(__name__)

COUNTED = "counted"
BINARY = "binary"
SPECTRUM_MODES = (COUNTED, BINARY)

DEFAULT_ORBIT_CAP = 10
ORBIT_WARN_ABOVE = 14


class SearchTooLarge(RuntimeError):
    pass


def _canonical(keys: Sequence) -> Partition:
    # classes numbered by their smallest member, so output is label-order stable
    return Partition.from_labels(list(keys))


def structural_classes(g: Graph) -> Partition:
    """Group nodes with identical neighbor sets."""
    return _canonical([tuple(g.neighbors(v).tolist()) for v in range(g.n)])


def _spectrum(g: Graph, labels: np.ndarray, v: int, mode: str) -> tuple:
    nbr = labels[g.neighbors(v)]
    if mode == BINARY:
        return tuple(np.unique(nbr).tolist())
    vals, counts = np.unique(nbr, return_counts=True)
    return tuple(zip(vals.tolist(), counts.tolist()))


def refine_partition(g: Graph, seed: Partition, mode: str = COUNTED) -> Partition:
    """Split classes of ``seed`` until every class has uniform neighbor spectra."""
    if mode not in SPECTRUM_MODES:
        raise ValueError(f"mode must be one of {SPECTRUM_MODES}")
    if seed.n != g.n:
        raise ValueError("seed partition size does not match graph")
    labels = seed.labels
    k = seed.k
    while True:
        keys = [(int(labels[v]), _spectrum(g, labels, v, mode)) for v in range(g.n)]
        nxt = _canonical(keys)
        if nxt.k == k:
            return _canonical(labels.tolist())
        labels, k = nxt.labels, nxt.k


def _uniform(g: Graph, p: Partition, mode: str) -> bool:
    seen: dict[int, tuple] = {}
    for v in range(g.n):
        spec = _spectrum(g, p.labels, v, mode)
        c = int(p.labels[v])
        if seen.setdefault(c, spec) != spec:
            return False
    return True


def is_equitable(g: Graph, p: Partition) -> bool:
    """Every class member has the same count of neighbors in each class."""
    return _uniform(g, p, COUNTED)


def is_regular(g: Graph, p: Partition) -> bool:
    """Every class member is adjacent to the same set of classes."""
    return _uniform(g, p, BINARY)


def degree_seed(g: Graph, edges: Optional[Sequence[int]] = None) -> Partition:
    """Seed partition by degree.

    Without ``edges`` each distinct degree is its own class. With ascending
    band edges ``[e1, e2, ...]`` a node of degree ``d`` goes to band
    ``searchsorted(edges, d, 'right')``, so ``[3, 5]`` yields bands
    ``d < 3``, ``3 <= d < 5`` and ``d >= 5``.
    """
    deg = g.degrees
    if edges is None:
        return _canonical(deg.tolist())
    bands = np.searchsorted(np.asarray(edges), deg, side="right")
    return _canonical(bands.tolist())


# --- automorphisms -------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def automorphisms(g: Graph):
    """Yield every adjacency-preserving permutation as a tuple ``perm[v]``.

    Candidates for each node are restricted to nodes of equal degree; partial
    maps are extended node by node and abandoned on the first adjacency
    mismatch with an already-mapped node.
    """
    n = g.n
    deg = g.degrees
    adj = [set(g.neighbors(v).tolist()) for v in range(n)]
    cands = [[w for w in range(n) if deg[w] == deg[v]] for v in range(n)]
    perm = [-1] * n
    taken = [False] * n

    def extend(v: int):
        if v == n:
            yield tuple(perm)
            return
        for w in cands[v]:
            if taken[w]:
                continue
            ok = True
            for x in range(v):
                if (x in adj[v]) != (perm[x] in adj[w]):
                    ok = False
                    break
            if not ok:
                continue
            perm[v] = w
            taken[w] = True
            yield from extend(v + 1)
            taken[w] = False
        perm[v] = -1

    yield from extend(0)


def automorphism_orbits_bruteforce(g: Graph, max_nodes: int = DEFAULT_ORBIT_CAP) -> Partition:
    """Orbit partition under the full automorphism group, by exhaustive search.

    Raises :class:`SearchTooLarge` above ``max_nodes``; for larger graphs use
    :func:`refine_partition` with ``COUNTED``, whose classes are a necessary
    condition (every orbit lies inside one refined class).
    """
    if g.n > max_nodes:
        raise SearchTooLarge(
            f"brute-force orbit search refused for n={g.n} > cap {max_nodes}; raise the cap "
            "explicitly or use counted refinement as a necessary condition"
        )
    if g.n > ORBIT_WARN_ABOVE:
        warnings.warn(f"brute-force orbit search on n={g.n} may take very long", RuntimeWarning)
    uf = _UnionFind(g.n)
    count = 0
    for perm in automorphisms(g):
        count += 1
        for v, w in enumerate(perm):
            uf.union(v, w)
    logger.debug("enumerated %d automorphisms", count)
    return _canonical([uf.find(v) for v in range(g.n)])
