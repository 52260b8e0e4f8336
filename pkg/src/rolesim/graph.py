"""Undirected simple graphs: construction, edge-list I/O, generators, K-shells.

Graphs are stored in CSR form (``indptr``/``indices``) with each adjacency
list sorted by neighbor id, which is the layout the numba kernels consume.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)


class EdgeListError(ValueError):
    """Raised for unreadable edge-list input."""


@dataclass(frozen=True)
class Partition:
    """Node -> class-id labeling with ids ``0..k-1``, every class non-empty."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.size:
            present = np.unique(labels)
            if present[0] != 0 or present[-1] != present.size - 1:
                raise ValueError("class ids must be exactly 0..k-1")

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @property
    def k(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Renumber arbitrary hashable labels; class order follows smallest member."""
        ids: dict = {}
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels):
            out[i] = ids.setdefault(lab, len(ids))
        return cls(out)

    @classmethod
    def from_classes(cls, n: int, classes: Iterable[Iterable[int]]) -> "Partition":
        """Build from explicit classes; nodes not mentioned become singletons."""
        labels: list = [("single", v) for v in range(n)]
        for i, members in enumerate(classes):
            for v in members:
                labels[v] = ("class", i)
        return cls.from_labels(labels)

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for v, c in enumerate(self.labels):
            out[c].append(v)
        return out

    def as_sets(self) -> set[frozenset[int]]:
        """Label-free view, handy for comparing partitions."""
        return {frozenset(c) for c in self.classes()}

    def refines(self, other: "Partition") -> bool:
        """True if every class of ``self`` lies inside one class of ``other``."""
        seen: dict[int, int] = {}
        for a, b in zip(self.labels.tolist(), other.labels.tolist()):
            if seen.setdefault(a, b) != b:
                return False
        return True

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["node", "class"])
            for v, c in enumerate(self.labels.tolist()):
                w.writerow([v, c])

    @classmethod
    def read_csv(cls, path) -> "Partition":
        pairs = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#") or row[0] == "node":
                    continue
                pairs.append((int(row[0]), int(row[1])))
        pairs.sort()
        if [p[0] for p in pairs] != list(range(len(pairs))):
            raise ValueError(f"{path}: partition must list nodes 0..n-1 exactly once")
        return cls.from_labels([p[1] for p in pairs])


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1``.

    ``labels[i]`` is the original label of compact node ``i`` (the id map).
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.labels is None:
            object.__setattr__(self, "labels", np.arange(self.n, dtype=np.int64))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        """Build from compact-id edges; self-loops and duplicates are dropped."""
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint out of range")
        return cls._from_array(n, arr, labels)

    @classmethod
    def _from_array(cls, n: int, arr: np.ndarray, labels=None) -> "Graph":
        loops = int(np.count_nonzero(arr[:, 0] == arr[:, 1])) if arr.size else 0
        arr = arr[arr[:, 0] != arr[:, 1]]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keys = np.unique(lo * n + hi)
        dups = len(arr) - len(keys)
        if loops or dups:
            logger.warning("dropped %d self-loops and %d duplicate edges", loops, dups)
        lo, hi = keys // n, keys % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError("labels must have one entry per node")
        return cls(n, indptr, dst.astype(np.int64), labels)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.n), self.degrees)
        mask = src < self.indices
        return list(zip(src[mask].tolist(), self.indices[mask].tolist()))

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    @cached_property
    def neighbor_degrees_sorted(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, values)`` of each node's neighbor degrees, ascending."""
        vals = self.degrees[self.indices].copy()
        for v in range(self.n):
            a, b = self.indptr[v], self.indptr[v + 1]
            vals[a:b].sort()
        return self.indptr, vals

    def adjacency_matrix(self):
        from scipy.sparse import csr_matrix

        data = np.ones(self.indices.size, dtype=np.float64)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with node ``v`` renamed ``perm[v]`` (labels follow the nodes)."""
        perm = np.asarray(perm, dtype=np.int64)
        arr = np.array(self.edges(), dtype=np.int64).reshape(-1, 2)
        labels = np.empty(self.n, dtype=np.int64)
        labels[perm] = self.labels
        return Graph._from_array(self.n, perm[arr] if arr.size else arr, labels)


# --- edge-list I/O -----------------------------------------------------------


def parse_edge_list(text: str | Iterable[str]) -> Graph:
    """Parse ``"u v"`` lines into a :class:`Graph` with compacted ids.

    Original labels are compacted in ascending order, so ``labels`` maps
    compact id -> original label. Lines starting with ``#`` and blank lines
    are skipped; extra columns after the first two are ignored.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    pairs = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise EdgeListError(f"line {lineno}: expected two node labels, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"line {lineno}: non-integer label in {line!r}") from None
        if a < 0 or b < 0:
            raise EdgeListError(f"line {lineno}: negative label in {line!r}")
        pairs.append((a, b))
    if not pairs:
        raise EdgeListError("empty edge list")
    raw = np.array(pairs, dtype=np.int64)
    labels, compact = np.unique(raw, return_inverse=True)
    return Graph._from_array(labels.size, compact.reshape(-1, 2), labels)


def _idmap_path(path: Path) -> Path:
    return path.with_name(path.name + ".idmap.csv")


def write_graph(g: Graph, path) -> None:
    """Write compact-id edge list plus an ``<path>.idmap.csv`` sidecar.

    The sidecar lists every node, so isolated nodes survive a round trip
    through :func:`read_graph`.
    """
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"# nodes {g.n} edges {g.num_edges}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")
    with open(_idmap_path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["original_label", "compact_id"])
        for i, lab in enumerate(g.labels.tolist()):
            w.writerow([lab, i])


def read_graph(path) -> Graph:
    """Read an edge-list file; honours a sidecar id map when present."""
    path = Path(path)
    sidecar = _idmap_path(path)
    if not sidecar.exists():
        return parse_edge_list(path.read_text())
    rows = []
    with open(sidecar, newline="") as fh:
        for row in csv.reader(fh):
            if row and row[0] != "original_label":
                rows.append((int(row[1]), int(row[0])))
    rows.sort()
    n = len(rows)
    labels = np.array([lab for _, lab in rows], dtype=np.int64)
    edges = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except (ValueError, IndexError):
            raise EdgeListError(f"{path}:{lineno}: malformed line {line!r}") from None
    return Graph.from_edges(n, edges, labels)


# --- generators ----------------------------------------------------------------


@dataclass
class BlockSpec:
    """Planted block model: block sizes, symmetric link probabilities, seed."""

    sizes: list[int]
    P: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=np.float64)
        k = len(self.sizes)
        if self.P.shape != (k, k):
            raise ValueError("P must be a len(sizes) x len(sizes) matrix")
        if not np.allclose(self.P, self.P.T):
            raise ValueError("P must be symmetric")
        if np.any(self.P < 0) or np.any(self.P > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        if any(s <= 0 for s in self.sizes):
            raise ValueError("block sizes must be positive")


def generate_block_model(spec: BlockSpec) -> tuple[Graph, Partition]:
    """Sample a block-model graph; nodes are numbered block by block."""
    rng = np.random.default_rng(spec.seed)
    sizes = list(spec.sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    n = int(offsets[-1])
    chunks = []
    for i in range(len(sizes)):
        for j in range(i, len(sizes)):
            p = spec.P[i, j]
            if i == j:
                a, b = np.triu_indices(sizes[i], k=1)
            else:
                a, b = np.meshgrid(np.arange(sizes[i]), np.arange(sizes[j]), indexing="ij")
                a, b = a.ravel(), b.ravel()
            # always draw, so the stream layout does not depend on p
            keep = rng.random(a.size) < p
            chunks.append(np.stack([a[keep] + offsets[i], b[keep] + offsets[j]], axis=1))
    arr = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    blocks = np.repeat(np.arange(len(sizes)), sizes)
    return Graph._from_array(n, arr.astype(np.int64)), Partition(blocks)


def random_block_spec(n: int, k: int, density: float, seed: int = 0, min_share: float = 0.1) -> BlockSpec:
    """Block spec with random block sizes and link probabilities.

    Sizes are drawn from a Dirichlet split with every block holding at least
    ``min_share`` of the nodes; probabilities are drawn uniformly and then
    rescaled so the expected edge count is ``density * n``. The returned
    spec's seed drives the edge sampling.
    """
    if k < 1 or n < 2 * k:
        raise ValueError("need k >= 1 and at least two nodes per block")
    if not 0.0 <= min_share * k <= 1.0:
        raise ValueError("min_share * k must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    free = 1.0 - min_share * k
    shares = min_share + free * rng.dirichlet(np.ones(k))
    sizes = np.maximum(2, np.floor(shares * n).astype(np.int64))
    sizes[np.argmax(sizes)] += n - int(sizes.sum())
    raw = rng.uniform(0.0, 1.0, size=(k, k))
    raw = np.triu(raw) + np.triu(raw, 1).T
    pairs = np.outer(sizes, sizes).astype(np.float64)
    np.fill_diagonal(pairs, sizes * (sizes - 1) / 2.0)
    expected = float(np.triu(raw * pairs).sum())
    P = np.clip(raw * (density * n / expected), 0.0, 1.0)
    return BlockSpec([int(x) for x in sizes], P, seed=int(rng.integers(2**31)))


def generate_scale_free(n: int, m: int, seed: int = 0) -> Graph:
    """Barabási–Albert preferential attachment from an (m+1)-clique.

    Each arriving node links to ``m`` distinct existing nodes chosen with
    probability proportional to degree, so ``|E| = m(m+1)/2 + m(n-m-1)``.
    """
    if m < 1 or n <= m:
        raise ValueError(f"need n > m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    edges = [(a, b) for a in range(m + 1) for b in range(a + 1, m + 1)]
    # every endpoint occurrence, so uniform sampling here is degree-proportional
    ends = np.empty(2 * (len(edges) + m * (n - m - 1)), dtype=np.int64)
    fill = 0
    for a, b in edges:
        ends[fill], ends[fill + 1] = a, b
        fill += 2
    for v in range(m + 1, n):
        chosen: list[int] = []
        while len(chosen) < m:
            t = int(ends[rng.integers(fill)])
            if t not in chosen:
                chosen.append(t)
        for t in chosen:
            edges.append((t, v))
            ends[fill], ends[fill + 1] = t, v
            fill += 2
    return Graph.from_edges(n, edges)


# --- K-core / K-shell ----------------------------------------------------------


def k_shell_decomposition(g: Graph) -> np.ndarray:
    """Core number of every node by bucket peeling (Batagelj–Zaversnik), O(|E|)."""
    n = g.n
    deg = g.degrees.astype(np.int64).copy()
    if n == 0:
        return deg
    maxdeg = int(deg.max())
    bin_ = np.zeros(maxdeg + 2, dtype=np.int64)
    for d in deg:
        bin_[d + 1] += 1
    bin_ = np.cumsum(bin_)[: maxdeg + 1].copy()  # start slot of each degree bucket
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    nxt = bin_.copy()
    for v in range(n):
        pos[v] = nxt[deg[v]]
        vert[pos[v]] = v
        nxt[deg[v]] += 1
    indptr, indices = g.indptr, g.indices
    for i in range(n):
        v = vert[i]
        for u in indices[indptr[v] : indptr[v + 1]]:
            if deg[u] > deg[v]:
                du = deg[u]
                pu, pw = pos[u], bin_[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bin_[du] += 1
                deg[u] -= 1
    return deg
