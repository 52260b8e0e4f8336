"""Threshold-pruned RoleSim: find the pairs scoring at least ``theta``.

Only candidate pairs are stored. Candidates come from three degree-based
filters applied to every pair, then RoleSim is iterated over the candidates
alone. Neighbor pairs that are not candidates are read as a fixed estimate
between the lower bound ``beta`` and the degree-ratio upper bound.

The pair filters, for ``d(u) >= d(v)`` and ``theta' = (theta - beta)/(1 - beta)``:

1. degree window: keep only ``theta' * d(u) <= d(v)``;
2. seed matching: the matching weight over degree-ratio scores must reach
   ``theta' * d(u)``;
3. lightest-neighbor shortcut: if v's lowest-degree neighbor cannot score
   above ``m11`` against any neighbor of u, the matching is capped at
   ``d(v) - 1 + m11`` and the pair is dropped without matching.

Seed scores equal the second ALL-1 iterate, so under ALL-1 (or degree-ratio)
iteration no pair whose final score reaches ``theta`` is ever filtered out.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numba as nb
import numpy as np

from .core import (
    DEFAULT_BETA,
    DEFAULT_MAX_ITERS,
    DEFAULT_REL_TOL,
    REL_EPS,
    IterationReport,
    _matched_score,
    degree_ratio_score,
)
from .graph import Graph
from .matching import EXACT, GREEDY, MODES, greedy_kernel, hungarian_kernel

logger = logging.getLogger(__name__)


@dataclass
class IcebergConfig:
    theta: float = 0.9
    beta: float = DEFAULT_BETA
    alpha: float = 0.5
    matching: str = EXACT
    rel_tol: float = DEFAULT_REL_TOL
    max_iters: int = DEFAULT_MAX_ITERS

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.beta < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (beta, 1], got theta={self.theta}, beta={self.beta}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.matching not in MODES:
            raise ValueError(f"matching must be one of {MODES}")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    @property
    def theta_prime(self) -> float:
        return (self.theta - self.beta) / (1.0 - self.beta)


class IcebergTable:
    """Sparse map from canonical pairs ``(u, v)``, ``u < v``, to scores.

    Entries are kept as parallel arrays sorted by ``(u, v)``.
    """

    def __init__(self, n: int, u: np.ndarray, v: np.ndarray, scores: np.ndarray):
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        scores = np.asarray(scores, dtype=np.float64)
        if not (u.shape == v.shape == scores.shape):
            raise ValueError("u, v and scores must have equal length")
        if np.any(u >= v):
            raise ValueError("pairs must be canonical with u < v")
        keys = u * n + v
        order = np.argsort(keys, kind="stable")
        keys = keys[order]
        if keys.size > 1 and np.any(keys[1:] == keys[:-1]):
            raise ValueError("duplicate pair in iceberg table")
        self.n = int(n)
        self.u = u[order]
        self.v = v[order]
        self.scores = scores[order]
        self.keys = keys

    def __len__(self) -> int:
        return int(self.keys.size)

    def _find(self, a: int, b: int) -> int:
        if a == b:
            return -1
        a, b = min(a, b), max(a, b)
        key = a * self.n + b
        i = int(np.searchsorted(self.keys, key))
        if i < self.keys.size and self.keys[i] == key:
            return i
        return -1

    def __contains__(self, pair) -> bool:
        return self._find(*pair) >= 0

    def get(self, a: int, b: int, default: Optional[float] = None) -> Optional[float]:
        i = self._find(a, b)
        return float(self.scores[i]) if i >= 0 else default

    @property
    def entries(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(s) for a, b, s in zip(self.u, self.v, self.scores)}

    def fraction_of_pairs(self) -> float:
        total = self.n * (self.n - 1) // 2
        return len(self) / total if total else 0.0

    def to_csv(self, path, cfg: IcebergConfig) -> None:
        with open(path, "w") as fh:
            fh.write(f"# iceberg theta={cfg.theta!r} beta={cfg.beta!r} alpha={cfg.alpha!r} n={self.n}\n")
            fh.write("u,v,score\n")
            for a, b, s in zip(self.u.tolist(), self.v.tolist(), self.scores.tolist()):
                fh.write(f"{a},{b},{s!r}\n")

    @classmethod
    def read_csv(cls, path, n: Optional[int] = None) -> "IcebergTable":
        us, vs, ss = [], [], []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line.startswith("#"):
                    for tok in line.split():
                        if tok.startswith("n=") and n is None:
                            n = int(tok[2:])
                    continue
                if not line or line.startswith("u,"):
                    continue
                a, b, s = line.split(",")
                us.append(int(a))
                vs.append(int(b))
                ss.append(float(s))
        if n is None:
            n = 1 + max(vs) if vs else 0
        return cls(n, np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), np.array(ss))


# --- bounds ----------------------------------------------------------------------


def theta_upper_bound(du: int, dv: int, beta: float) -> float:
    """Largest score any pair with these degrees can reach."""
    return float(degree_ratio_score(int(du), int(dv), float(beta)))


@nb.njit(cache=True, inline="always")
def _estimate(du, dv, alpha, beta):
    lo = min(du, dv)
    hi = max(du, dv)
    if hi == 0:
        return 1.0
    return alpha * (1.0 - beta) * lo / hi + beta


def estimate_noncandidate(du: int, dv: int, alpha: float, beta: float) -> float:
    """Stand-in score for a neighbor pair missing from the table.

    ``alpha = 0`` gives ``beta``; ``alpha = 1`` gives the degree-ratio bound.
    """
    return float(_estimate(int(du), int(dv), float(alpha), float(beta)))


# --- seeding ---------------------------------------------------------------------


@nb.njit(cache=True)
def _seed_kernel(indptr, indices, deg, order, min_nbr_deg, beta, theta_p, greedy):
    n = deg.size
    maxd = 0
    for x in range(n):
        maxd = max(maxd, deg[x])
    grid = np.empty((maxd, maxd))
    assign = np.empty(maxd + 1, dtype=np.int64)
    hu = np.empty(maxd + 1)
    hv = np.empty(maxd + 1)
    hp = np.empty(maxd + 1, dtype=np.int64)
    way = np.empty(maxd + 1, dtype=np.int64)
    minv = np.empty(maxd + 1)
    used = np.empty(maxd + 1, dtype=np.bool_)
    rused = np.empty(maxd, dtype=np.bool_)
    cused = np.empty(maxd, dtype=np.bool_)

    sorted_deg = deg[order].astype(np.float64)
    cap = 1024
    out_a = np.empty(cap, dtype=np.int64)
    out_b = np.empty(cap, dtype=np.int64)
    out_s = np.empty(cap)
    count = 0
    checked = 0
    rule3 = 0

    for i in range(n):
        u0 = order[i]
        du = deg[u0]
        lo = np.searchsorted(sorted_deg, theta_p * du)
        for j in range(lo, i):
            v0 = order[j]
            u = u0
            v = v0
            dv = deg[v]
            checked += 1
            if du == 0:
                score = 1.0
            else:
                # orient so that the shortcut test can apply when degrees tie
                if dv == du and min_nbr_deg[v] > min_nbr_deg[u]:
                    u, v = v, u
                m1u = min_nbr_deg[u]
                m1v = min_nbr_deg[v]
                if m1v <= m1u:
                    m11 = degree_ratio_score(m1u, m1v, beta)
                    if dv - 1 + m11 < theta_p * du:
                        rule3 += 1
                        continue
                ou = indptr[u]
                ov = indptr[v]
                # rows: v's neighbors (the smaller side); cols: u's neighbors
                for r in range(dv):
                    y = indices[ov + r]
                    for c in range(du):
                        x = indices[ou + c]
                        if x == y:
                            grid[r, c] = 1.0
                        else:
                            grid[r, c] = degree_ratio_score(deg[x], deg[y], beta)
                if greedy:
                    w = greedy_kernel(grid, dv, du, assign, rused, cused)
                else:
                    w = hungarian_kernel(grid, dv, du, False, assign, hu, hv, hp, way, minv, used)
                if w < theta_p * du:
                    continue
                score = _matched_score(w, float(du), beta)
            if count == cap:
                cap *= 2
                out_a = _grow_int(out_a, cap)
                out_b = _grow_int(out_b, cap)
                out_s = _grow_float(out_s, cap)
            out_a[count] = min(u0, v0)
            out_b[count] = max(u0, v0)
            out_s[count] = score
            count += 1
    return out_a[:count], out_b[:count], out_s[:count], checked, rule3


@nb.njit(cache=True)
def _grow_int(a, cap):
    out = np.empty(cap, dtype=np.int64)
    out[: a.size] = a
    return out


@nb.njit(cache=True)
def _grow_float(a, cap):
    out = np.empty(cap)
    out[: a.size] = a
    return out


def _min_neighbor_degree(g: Graph) -> np.ndarray:
    indptr, nbr_deg = g.neighbor_degrees_sorted
    out = np.zeros(g.n, dtype=np.int64)
    has = np.diff(indptr) > 0
    out[has] = nbr_deg[indptr[:-1][has]]
    return out


def seed_candidates(g: Graph, cfg: IcebergConfig) -> IcebergTable:
    """Apply the three pair filters and return the candidate table with seed scores."""
    deg = g.degrees.astype(np.int64)
    order = np.lexsort((np.arange(g.n), deg)).astype(np.int64)
    a, b, s, checked, rule3 = _seed_kernel(
        g.indptr, g.indices, deg, order, _min_neighbor_degree(g),
        float(cfg.beta), float(cfg.theta_prime), cfg.matching == GREEDY,
    )
    logger.info(
        "iceberg seeding: %d pairs inside the degree window, %d dropped by the "
        "neighbor-degree shortcut, %d kept", checked, rule3, a.size,
    )
    return IcebergTable(g.n, a, b, s)


# --- iteration -------------------------------------------------------------------


@nb.njit(cache=True, inline="always")
def _lookup(keys, prev, n, x, y, deg, alpha, beta):
    if x == y:
        return 1.0
    if x > y:
        x, y = y, x
    key = x * n + y
    i = np.searchsorted(keys, key)
    if i < keys.size and keys[i] == key:
        return prev[i]
    return _estimate(deg[x], deg[y], alpha, beta)


@nb.njit(cache=True, parallel=True)
def _table_sweep(indptr, indices, deg, keys, eu, ev, prev, out, alpha, beta, greedy, abs_d, rel_d, rel_eps):
    n = deg.size
    m = keys.size
    for t in nb.prange(m):
        a = eu[t]
        b = ev[t]
        da = deg[a]
        db = deg[b]
        if da == 0 or db == 0:
            s = degree_ratio_score(da, db, beta)
        else:
            if da > db:
                a, b = b, a
                da, db = db, da
            grid = np.empty((da, db))
            oa = indptr[a]
            ob = indptr[b]
            for r in range(da):
                x = indices[oa + r]
                for c in range(db):
                    grid[r, c] = _lookup(keys, prev, n, x, indices[ob + c], deg, alpha, beta)
            assign = np.empty(db + 1, dtype=np.int64)
            if greedy:
                w = greedy_kernel(grid, da, db, assign, np.empty(da, dtype=np.bool_),
                                  np.empty(db, dtype=np.bool_))
            else:
                w = hungarian_kernel(grid, da, db, False, assign, np.empty(db + 1), np.empty(db + 1),
                                     np.empty(db + 1, dtype=np.int64), np.empty(db + 1, dtype=np.int64),
                                     np.empty(db + 1), np.empty(db + 1, dtype=np.bool_))
            s = _matched_score(w, float(db), beta)
        out[t] = s
        d = abs(s - prev[t])
        abs_d[t] = d
        rel_d[t] = d / max(prev[t], rel_eps)


def compute_iceberg(
    g: Graph, cfg: Optional[IcebergConfig] = None
) -> tuple[IcebergTable, IterationReport]:
    """Seed the candidate table, then iterate RoleSim over its entries only."""
    cfg = cfg or IcebergConfig()
    table = seed_candidates(g, cfg)
    deg = g.degrees.astype(np.int64)
    cur = table.scores.copy()
    report = IterationReport()
    if len(table) == 0:
        report.converged = True
        return table, report
    abs_d = np.empty_like(cur)
    rel_d = np.empty_like(cur)
    for k in range(1, cfg.max_iters + 1):
        new = np.empty_like(cur)
        _table_sweep(g.indptr, g.indices, deg, table.keys, table.u, table.v, cur, new,
                     float(cfg.alpha), float(cfg.beta), cfg.matching == GREEDY, abs_d, rel_d, REL_EPS)
        d_abs = float(abs_d.max())
        d_rel = float(rel_d.max())
        report.iterations = k
        report.deltas.append(d_abs)
        report.rel_deltas.append(d_rel)
        cur = new
        logger.debug("iceberg iteration %d: max abs %.3g, max rel %.3g", k, d_abs, d_rel)
        if d_rel < cfg.rel_tol:
            report.converged = True
            break
    return IcebergTable(g.n, table.u, table.v, cur), report
