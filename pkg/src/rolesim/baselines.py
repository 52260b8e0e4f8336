"""SimRank-family reference measures on undirected graphs.

All three iterate from the identity matrix with the diagonal pinned to 1 and
use the same relative-change stopping rule as RoleSim. ``decay`` plays the
role of RoleSim's ``beta``: the per-step multiplier is ``c = 1 - decay``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .core import (
    DEFAULT_BETA,
    DEFAULT_MAX_ITERS,
    DEFAULT_MAX_NODES,
    DEFAULT_REL_TOL,
    REL_EPS,
    IterationReport,
    SimilarityMatrix,
    _check_size,
)
from .graph import Graph

logger = logging.getLogger(__name__)


@dataclass
class BaselineConfig:
    decay: float = DEFAULT_BETA
    rel_tol: float = DEFAULT_REL_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    max_nodes: int = DEFAULT_MAX_NODES

    def __post_init__(self):
        if not 0.0 < self.decay < 1.0:
            raise ValueError(f"decay must lie in (0, 1), got {self.decay}")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    @property
    def c(self) -> float:
        return 1.0 - self.decay


def evidence(g: Graph, u: int, v: int) -> float:
    """``sum_{i=1..k} 2^-i`` for ``k`` common neighbors."""
    k = np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True).size
    return 1.0 - 0.5 ** k


def _iterate(
    g: Graph, cfg: BaselineConfig, step: Callable[[np.ndarray], np.ndarray]
) -> tuple[SimilarityMatrix, IterationReport]:
    _check_size(g.n, cfg.max_nodes)
    cur = np.eye(g.n)
    report = IterationReport()
    diag = np.arange(g.n)
    for k in range(1, cfg.max_iters + 1):
        new = step(cur)
        new[diag, diag] = 1.0
        diff = np.abs(new - cur)
        d_abs = float(diff.max()) if diff.size else 0.0
        d_rel = float((diff / np.maximum(cur, REL_EPS)).max()) if diff.size else 0.0
        report.iterations = k
        report.deltas.append(d_abs)
        report.rel_deltas.append(d_rel)
        cur = new
        if d_rel < cfg.rel_tol:
            report.converged = True
            break
    return SimilarityMatrix(cur), report


def _adjacency(g: Graph) -> sp.csr_matrix:
    return g.adjacency_matrix().astype(np.float64).tocsr()


def simrank_run(g: Graph, cfg: Optional[BaselineConfig] = None):
    """SimRank with its iteration report."""
    cfg = cfg or BaselineConfig()
    deg = g.degrees.astype(np.float64)
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    # row-normalised adjacency; isolated rows stay zero so their pairs score 0
    walk = sp.diags(inv) @ _adjacency(g)
    c = cfg.c

    def step(s):
        half = np.asarray(walk @ s)
        return c * np.asarray(walk @ half.T)

    return _iterate(g, cfg, step)


def simrank(g: Graph, cfg: Optional[BaselineConfig] = None) -> SimilarityMatrix:
    """Average neighbor-pair similarity, damped by ``1 - decay``."""
    return simrank_run(g, cfg)[0]


def simrank_pp_run(g: Graph, cfg: Optional[BaselineConfig] = None):
    cfg = cfg or BaselineConfig()
    adj = _adjacency(g)
    common = np.asarray((adj @ adj).todense())
    ev = 1.0 - np.power(0.5, common)
    c = cfg.c

    def step(s):
        # unnormalised neighbor-pair sum; clamped because it can exceed 1
        total = np.asarray(adj @ np.asarray(adj @ s).T)
        return np.clip(ev * c * total, 0.0, 1.0)

    return _iterate(g, cfg, step)


def simrank_pp(g: Graph, cfg: Optional[BaselineConfig] = None) -> SimilarityMatrix:
    """Evidence-weighted SimRank with unit edge weights, clamped to [0, 1]."""
    return simrank_pp_run(g, cfg)[0]


def psimrank_run(g: Graph, cfg: Optional[BaselineConfig] = None):
    cfg = cfg or BaselineConfig()
    adj = _adjacency(g)
    deg = g.degrees.astype(np.float64)
    common = np.asarray((adj @ adj).todense())
    union = deg[:, None] + deg[None, :] - common
    nonempty = (deg[:, None] > 0) & (deg[None, :] > 0)
    jaccard = np.divide(common, union, out=np.zeros_like(common), where=nonempty)
    # 1/(|A u B| * |B|) for the a-side term; its transpose serves the b-side
    scale = np.divide(1.0, union * deg[None, :], out=np.zeros_like(common), where=nonempty)
    c = cfg.c

    def step(s):
        sa = np.asarray(adj @ s)  # symmetric s, so this is (S A) transposed
        full = np.asarray(adj @ sa.T)  # sum over x in A, y in B
        # remove x in A n B: sum_x A[a,x] A[x,b] (S A)[x,b]
        shared = (adj @ sp.csr_matrix(adj.multiply(sa.T))).toarray()
        side = (full - shared) * scale
        return c * (jaccard + side + side.T)

    return _iterate(g, cfg, step)


def psimrank(g: Graph, cfg: Optional[BaselineConfig] = None) -> SimilarityMatrix:
    """Coupled-walk SimRank that credits shared neighbors by their Jaccard share."""
    return psimrank_run(g, cfg)[0]


MEASURES = {
    "simrank": simrank_run,
    "simrankpp": simrank_pp_run,
    "psimrank": psimrank_run,
}
