"""RoleSim fixed-point iteration over a dense similarity matrix.

Each sweep recomputes every pair from the previous snapshot::

    R(u, v) = (1 - beta) * w(M) / max(deg u, deg v) + beta

where ``w(M)`` is the weight of a maximum matching between the neighbor sets
under the previous scores. The matrix is stored full and symmetric (only the
upper triangle is computed, then mirrored), with a pinned unit diagonal.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numba as nb
import numpy as np

from .graph import Graph
from .matching import EXACT, GREEDY, MODES, greedy_kernel, hungarian_kernel, match

logger = logging.getLogger(__name__)

ALL1 = "all1"
DEGREE_BINARY = "degree-binary"
DEGREE_RATIO = "degree-ratio"
INIT_SCHEMES = (ALL1, DEGREE_BINARY, DEGREE_RATIO)

DEFAULT_BETA = 0.1
DEFAULT_REL_TOL = 0.01
DEFAULT_MAX_ITERS = 100
DEFAULT_MAX_NODES = 30_000
REL_EPS = 1e-12


class MatrixTooLarge(RuntimeError):
    pass


@dataclass
class RoleSimConfig:
    beta: float = DEFAULT_BETA
    init: str = DEGREE_RATIO
    matching: str = EXACT
    rel_tol: float = DEFAULT_REL_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    convergence: str = "relative"  # or "absolute"
    max_nodes: int = DEFAULT_MAX_NODES

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.init not in INIT_SCHEMES:
            raise ValueError(f"init must be one of {INIT_SCHEMES}")
        if self.matching not in MODES:
            raise ValueError(f"matching must be one of {MODES}")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.convergence not in ("relative", "absolute"):
            raise ValueError("convergence must be 'relative' or 'absolute'")


@dataclass
class IterationReport:
    iterations: int = 0
    deltas: list[float] = field(default_factory=list)  # D_k, max absolute change
    rel_deltas: list[float] = field(default_factory=list)
    converged: bool = False

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "final_delta": self.deltas[-1] if self.deltas else None,
            "final_rel_delta": self.rel_deltas[-1] if self.rel_deltas else None,
        }


@dataclass
class SimilarityMatrix:
    """Dense symmetric scores with unit diagonal."""

    scores: np.ndarray

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    def __getitem__(self, uv):
        return float(self.scores[uv])

    def upper(self) -> np.ndarray:
        """Strict upper triangle, row-major."""
        return self.scores[np.triu_indices(self.n, k=1)]

    @classmethod
    def from_upper(cls, n: int, values) -> "SimilarityMatrix":
        s = np.eye(n)
        iu = np.triu_indices(n, k=1)
        s[iu] = values
        s[(iu[1], iu[0])] = values
        return cls(s)


# --- score formula -------------------------------------------------------------


@nb.njit(cache=True, inline="always")
def _matched_score(weight, larger_degree, beta):
    # full matches come out as exactly 1.0, so automorphic pairs stay pinned
    ratio = weight / larger_degree
    if ratio >= 1.0:
        return 1.0
    return (1.0 - beta) * ratio + beta


@nb.njit(cache=True)
def degree_ratio_score(du, dv, beta):
    """``(1-beta) * min/max + beta``; 1 for two isolated nodes, beta for one."""
    lo = min(du, dv)
    hi = max(du, dv)
    if hi == 0:
        return 1.0
    if lo == 0:
        return beta
    return _matched_score(float(lo), float(hi), beta)


def generalized_jaccard(size_a: int, size_b: int, match_weight: float, match_size: int) -> float:
    """Matched weight over ``|A| + |B| - |M|``; two empty sets score 1."""
    if match_size > min(size_a, size_b) or match_weight > match_size + 1e-12:
        raise ValueError("need |M| <= min(|A|, |B|) and weight <= |M|")
    denom = size_a + size_b - match_size
    if denom == 0:
        return 1.0
    return match_weight / denom


# --- initialisation ------------------------------------------------------------


@nb.njit(cache=True)
def _degree_ratio_matrix(deg, beta):
    n = deg.size
    out = np.empty((n, n))
    for u in range(n):
        out[u, u] = 1.0
        for v in range(u + 1, n):
            s = degree_ratio_score(deg[u], deg[v], beta)
            out[u, v] = s
            out[v, u] = s
    return out


def initialize(g: Graph, scheme: str, beta: float = DEFAULT_BETA) -> SimilarityMatrix:
    deg = g.degrees.astype(np.int64)
    if scheme == ALL1:
        return SimilarityMatrix(np.ones((g.n, g.n)))
    if scheme == DEGREE_BINARY:
        return SimilarityMatrix((deg[:, None] == deg[None, :]).astype(np.float64))
    if scheme == DEGREE_RATIO:
        return SimilarityMatrix(_degree_ratio_matrix(deg, beta))
    raise ValueError(f"unknown init scheme {scheme!r}")


# --- per-pair update -------------------------------------------------------------


def pair_update(g: Graph, prev: SimilarityMatrix, u: int, v: int, cfg: RoleSimConfig) -> float:
    """One RoleSim update of a single pair, via the public matching API."""
    if u == v:
        return 1.0
    nu, nv = g.neighbors(u), g.neighbors(v)
    if nu.size == 0 or nv.size == 0:
        return degree_ratio_score(nu.size, nv.size, cfg.beta)
    grid = prev.scores[np.ix_(nu, nv)]
    res = match(grid, cfg.matching)
    return _matched_score(res.weight, float(max(nu.size, nv.size)), cfg.beta)


@nb.njit(cache=True, nogil=True)
def _pair_kernel(indptr, indices, prev, a, b, beta, greedy, grid, assign, u_, v_, p_, way, minv, used, rused, cused):
    da = indptr[a + 1] - indptr[a]
    db = indptr[b + 1] - indptr[b]
    if da == 0 or db == 0:
        return degree_ratio_score(da, db, beta)
    if da > db:
        oa = indptr[b]
        ob = indptr[a]
        da, db = db, da
    else:
        oa = indptr[a]
        ob = indptr[b]
    for i in range(da):
        x = indices[oa + i]
        for j in range(db):
            grid[i, j] = prev[x, indices[ob + j]]
    if greedy:
        w = greedy_kernel(grid, da, db, assign, rused, cused)
    else:
        w = hungarian_kernel(grid, da, db, False, assign, u_, v_, p_, way, minv, used)
    return _matched_score(w, float(db), beta)


@nb.njit(cache=True, parallel=True)
def _sweep(indptr, indices, prev, out, beta, greedy, row_abs, row_rel):
    n = prev.shape[0]
    maxd = 0
    for v in range(n):
        maxd = max(maxd, indptr[v + 1] - indptr[v])
    for a in nb.prange(n):
        grid = np.empty((maxd, maxd))
        assign = np.empty(maxd + 1, dtype=np.int64)
        u_ = np.empty(maxd + 1)
        v_ = np.empty(maxd + 1)
        p_ = np.empty(maxd + 1, dtype=np.int64)
        way = np.empty(maxd + 1, dtype=np.int64)
        minv = np.empty(maxd + 1)
        used = np.empty(maxd + 1, dtype=np.bool_)
        rused = np.empty(maxd, dtype=np.bool_)
        cused = np.empty(maxd, dtype=np.bool_)
        out[a, a] = 1.0
        best_abs = 0.0
        best_rel = 0.0
        for b in range(a + 1, n):
            s = _pair_kernel(indptr, indices, prev, a, b, beta, greedy, grid, assign,
                             u_, v_, p_, way, minv, used, rused, cused)
            out[a, b] = s
            out[b, a] = s
            old = prev[a, b]
            d = abs(s - old)
            if d > best_abs:
                best_abs = d
            r = d / max(old, 1e-12)
            if r > best_rel:
                best_rel = r
        row_abs[a] = best_abs
        row_rel[a] = best_rel


def _check_size(n: int, cap: int) -> None:
    if n > cap:
        raise MatrixTooLarge(
            f"dense similarity matrix for n={n} exceeds the cap of {cap} nodes; "
            "use the iceberg computation for large graphs"
        )


def rolesim_sweep(g: Graph, prev: np.ndarray, beta: float, matching: str = EXACT):
    """One synchronous sweep. Returns ``(new_scores, max_abs_change, max_rel_change)``."""
    out = np.empty_like(prev)
    row_abs = np.zeros(g.n)
    row_rel = np.zeros(g.n)
    _sweep(g.indptr, g.indices, prev, out, float(beta), matching == GREEDY, row_abs, row_rel)
    if g.n == 0:
        return out, 0.0, 0.0
    return out, float(row_abs.max()), float(row_rel.max())


def compute_rolesim(
    g: Graph,
    cfg: Optional[RoleSimConfig] = None,
    initial: Optional[SimilarityMatrix] = None,
    callback: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None,
) -> tuple[SimilarityMatrix, IterationReport]:
    """Iterate RoleSim to convergence.

    ``initial`` overrides ``cfg.init`` (it must be an admissible matrix for the
    axioms to carry over). ``callback(k, prev, new)`` is invoked after every
    sweep and must not mutate its arguments.
    """
    cfg = cfg or RoleSimConfig()
    _check_size(g.n, cfg.max_nodes)
    cur = (initial or initialize(g, cfg.init, cfg.beta)).scores
    cur = np.ascontiguousarray(cur, dtype=np.float64)
    report = IterationReport()
    for k in range(1, cfg.max_iters + 1):
        new, d_abs, d_rel = rolesim_sweep(g, cur, cfg.beta, cfg.matching)
        report.iterations = k
        report.deltas.append(d_abs)
        report.rel_deltas.append(d_rel)
        if callback is not None:
            callback(k, cur, new)
        cur = new
        crit = d_rel if cfg.convergence == "relative" else d_abs
        logger.debug("iteration %d: max abs %.3g, max rel %.3g", k, d_abs, d_rel)
        if crit < cfg.rel_tol:
            report.converged = True
            break
    return SimilarityMatrix(cur), report


# --- persistence ---------------------------------------------------------------

MAGIC = b"RSIM"
VERSION = 1


def write_matrix_binary(m: SimilarityMatrix, path) -> None:
    """``RSIM`` + version byte + uint64 n + strict upper triangle as float64, all LE."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BQ", VERSION, m.n))
        fh.write(m.upper().astype("<f8").tobytes())


def read_matrix_binary(path) -> SimilarityMatrix:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not an RSIM file")
    version, n = struct.unpack_from("<BQ", data, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported RSIM version {version}")
    count = n * (n - 1) // 2
    vals = np.frombuffer(data, dtype="<f8", count=count, offset=13)
    return SimilarityMatrix.from_upper(n, vals.astype(np.float64))


def write_matrix_csv(m: SimilarityMatrix, path) -> None:
    iu, iv = np.triu_indices(m.n, k=1)
    vals = m.scores[iu, iv]
    with open(path, "w") as fh:
        fh.write(f"# n={m.n}\nu,v,score\n")
        for a, b, s in zip(iu.tolist(), iv.tolist(), vals.tolist()):
            fh.write(f"{a},{b},{s!r}\n")


def read_matrix_csv(path) -> SimilarityMatrix:
    n = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("# n="):
                n = int(line[4:])
                continue
            if not line or line.startswith("#") or line.startswith("u,"):
                continue
            a, b, s = line.split(",")
            rows.append((int(a), int(b), float(s)))
    if n is None:
        n = 1 + max(max(a, b) for a, b, _ in rows) if rows else 0
    s = np.eye(n)
    for a, b, val in rows:
        s[a, b] = s[b, a] = val
    return SimilarityMatrix(s)


def read_matrix(path) -> SimilarityMatrix:
    with open(path, "rb") as fh:
        head = fh.read(4)
    return read_matrix_binary(path) if head == MAGIC else read_matrix_csv(path)


def write_matrix(m: SimilarityMatrix, path) -> None:
    if str(path).endswith(".csv"):
        write_matrix_csv(m, path)
    else:
        write_matrix_binary(m, path)
