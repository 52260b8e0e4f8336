"""Scoring helpers: axiom checks, percentile ranks, correlation, block recovery, top-k."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.stats import rankdata

from .core import SimilarityMatrix
from .graph import Partition
from .iceberg import IcebergTable

AXIOMS = ("P1", "P2", "P3", "P4", "P5")
AXIOM_NAMES = {
    "P1": "range",
    "P2": "symmetry",
    "P3": "automorphism confirmation",
    "P4": "transitive similarity",
    "P5": "triangle inequality",
}
TRIANGLE_MAX_NODES = 200


@dataclass
class AxiomReport:
    """Worst violation per axiom; an axiom that was not evaluated has ``None``."""

    tol: float
    violations: dict[str, Optional[float]] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def passed(self, axiom: str) -> Optional[bool]:
        v = self.violations.get(axiom)
        return None if v is None else v <= self.tol

    @property
    def all_passed(self) -> bool:
        """True when every evaluated axiom holds (skipped ones do not count)."""
        return all(self.passed(a) is not False for a in AXIOMS)

    @property
    def skipped(self) -> list[str]:
        return [a for a in AXIOMS if self.violations.get(a) is None]

    def lines(self) -> list[str]:
        out = []
        for a in AXIOMS:
            v = self.violations.get(a)
            status = "SKIP" if v is None else ("PASS" if v <= self.tol else "FAIL")
            detail = self.notes.get(a, "") if v is None else f"worst violation {v:.3g}"
            out.append(f"{a} {AXIOM_NAMES[a]:<26} {status}  {detail}")
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["axiom", "name", "status", "violation", "tol"])
            for a in AXIOMS:
                v = self.violations.get(a)
                status = "skip" if v is None else ("pass" if v <= self.tol else "fail")
                w.writerow([a, AXIOM_NAMES[a], status, "" if v is None else repr(v), self.tol])


def _block_spread(s: np.ndarray, labels: np.ndarray) -> float:
    """Largest max-min spread of scores inside any class-by-class block."""
    order = np.argsort(labels, kind="stable")
    sizes = np.bincount(labels)
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    worst = 0.0
    # a block can only vary if one of its two classes has several members
    for c in np.flatnonzero(sizes > 1):
        sub = s[np.ix_(np.flatnonzero(labels == c), order)]
        hi = np.maximum.reduceat(sub.max(axis=0), starts)
        lo = np.minimum.reduceat(sub.min(axis=0), starts)
        worst = max(worst, float((hi - lo).max()))
    return worst


def _score_one_classes(s: np.ndarray, tol: float) -> np.ndarray:
    """Classes of the relation ``s(a, b) >= 1 - tol`` closed under transitivity."""
    n = s.shape[0]
    parent = np.arange(n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    a_idx, b_idx = np.nonzero(np.triu(s >= 1.0 - tol, k=1))
    for a, b in zip(a_idx.tolist(), b_idx.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return Partition.from_labels([find(v) for v in range(n)]).labels


def _triangle_violation(s: np.ndarray) -> float:
    d = 1.0 - s
    worst = 0.0
    for b in range(d.shape[0]):
        excess = d - d[:, b][:, None] - d[b, :][None, :]
        worst = max(worst, float(excess.max()))
    return worst


def check_axioms(
    m: SimilarityMatrix | np.ndarray,
    orbits: Optional[Partition] = None,
    tol: float = 1e-9,
    triangle_max_nodes: int = TRIANGLE_MAX_NODES,
) -> AxiomReport:
    """Measure how far a score matrix is from each of the five role axioms.

    Without ``orbits`` the automorphism check is skipped and transitivity is
    checked over the classes of pairs that score 1 (within ``tol``).
    """
    s = np.asarray(m.scores if isinstance(m, SimilarityMatrix) else m, dtype=np.float64)
    n = s.shape[0]
    rep = AxiomReport(tol=tol)
    if n == 0:
        rep.violations = {a: 0.0 for a in AXIOMS}
        return rep
    rep.violations["P1"] = max(0.0, float(-s.min()), float(s.max() - 1.0))
    rep.violations["P2"] = float(np.abs(s - s.T).max())
    if orbits is not None:
        if orbits.n != n:
            raise ValueError("orbit partition size does not match the matrix")
        same = orbits.labels[:, None] == orbits.labels[None, :]
        rep.violations["P3"] = float(np.max(np.where(same, 1.0 - s, 0.0)))
        rep.violations["P4"] = _block_spread(s, orbits.labels)
    else:
        rep.violations["P3"] = None
        rep.notes["P3"] = "no orbit partition supplied"
        rep.violations["P4"] = _block_spread(s, _score_one_classes(s, tol))
        rep.notes["P4"] = "checked over score-1 classes"
    if n <= triangle_max_nodes:
        rep.violations["P5"] = _triangle_violation(s)
    else:
        rep.violations["P5"] = None
        rep.notes["P5"] = f"n={n} exceeds {triangle_max_nodes}; cubic check skipped"
    return rep


# --- rankings ----------------------------------------------------------------------


def percentile_ranks(scores) -> np.ndarray:
    """Average ascending rank divided by count, so the top score maps to 1."""
    x = np.asarray(scores, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("percentile ranks of an empty list are undefined")
    return rankdata(x, method="average") / x.size


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size or x.size == 0:
        raise ValueError("inputs must be non-empty and of equal length")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = np.sqrt(np.dot(dx, dx))
    sy = np.sqrt(np.dot(dy, dy))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation is undefined for a constant input")
    return float(np.clip(np.dot(dx, dy) / (sx * sy), -1.0, 1.0))


@dataclass
class BlockRankReport:
    per_block: dict[int, float]
    overall: float
    pairs: int

    def to_csv(self, path, label: str = "score") -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["measure", "block", "avg_percentile"])
            for b, v in sorted(self.per_block.items()):
                w.writerow([label, b, repr(v)])
            w.writerow([label, "overall", repr(self.overall)])


def within_block_avg_rank(m: SimilarityMatrix | np.ndarray, blocks: Partition) -> BlockRankReport:
    """Average percentile rank of same-block pairs among all off-diagonal pairs."""
    s = np.asarray(m.scores if isinstance(m, SimilarityMatrix) else m)
    n = s.shape[0]
    if blocks.n != n:
        raise ValueError("block partition must cover every node")
    iu, iv = np.triu_indices(n, k=1)
    ranks = percentile_ranks(s[iu, iv])
    lab_u, lab_v = blocks.labels[iu], blocks.labels[iv]
    same = lab_u == lab_v
    per_block = {}
    for b in range(blocks.k):
        sel = same & (lab_u == b)
        if sel.any():
            per_block[b] = float(ranks[sel].mean())
    overall = float(ranks[same].mean()) if same.any() else float("nan")
    return BlockRankReport(per_block, overall, int(same.sum()))


def topk_pairs(
    source: Union[SimilarityMatrix, IcebergTable, np.ndarray], k: int
) -> list[tuple[int, int, float]]:
    """Highest-scoring pairs ``u < v``; ties broken by ``(u, v)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(source, IcebergTable):
        u, v, s = source.u, source.v, source.scores
    else:
        mat = np.asarray(source.scores if isinstance(source, SimilarityMatrix) else source)
        u, v = np.triu_indices(mat.shape[0], k=1)
        s = mat[u, v]
    order = np.lexsort((v, u, -s))[:k]
    return [(int(u[i]), int(v[i]), float(s[i])) for i in order]
