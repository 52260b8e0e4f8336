"""Maximum-weight bipartite matching between two neighbor sets.

Two solvers share one contract: given a ``rows x cols`` grid of weights in
[0, 1], select ``min(rows, cols)`` cells with no repeated row or column.

* :func:`exact_matching` - Hungarian method (shortest augmenting paths with
  potentials), optimal.
* :func:`greedy_matching` - repeatedly take the heaviest free cell; a
  1/2-approximation that still finds every all-ones perfect matching.

The ``*_kernel`` functions are numba-compiled and are what the RoleSim
sweeps call per node pair; the public wrappers add validation and return a
:class:`MatchResult`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

EXACT = "exact"
GREEDY = "greedy"
MODES = (EXACT, GREEDY)


@dataclass
class MatchResult:
    weight: float
    pairs: list[tuple[int, int]] = field(default_factory=list)


@nb.njit(cache=True, nogil=True)
def hungarian_kernel(w, rows, cols, transpose, assign, u, v, p, way, minv, used):
    """Max-weight matching on ``w[:rows, :cols]`` with ``rows <= cols``.

    If ``transpose`` is set the logical grid is ``w[:cols, :rows].T``; callers
    use this to keep the shorter side as rows without copying. Writes the
    chosen column of each row into ``assign[:rows]`` and returns the weight.
    The remaining arguments are scratch buffers of length ``>= cols + 1``.
    """
    if rows == 0:
        return 0.0
    for j in range(cols + 1):
        v[j] = 0.0
        p[j] = 0
        way[j] = 0
    for i in range(rows + 1):
        u[i] = 0.0
    for i in range(1, rows + 1):
        p[0] = i
        j0 = 0
        for j in range(cols + 1):
            minv[j] = np.inf
            used[j] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, cols + 1):
                if not used[j]:
                    if transpose:
                        cost = 1.0 - w[j - 1, i0 - 1]
                    else:
                        cost = 1.0 - w[i0 - 1, j - 1]
                    cur = cost - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(cols + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    total = 0.0
    for j in range(1, cols + 1):
        if p[j] != 0:
            assign[p[j] - 1] = j - 1
    for i in range(rows):
        if transpose:
            total += w[assign[i], i]
        else:
            total += w[i, assign[i]]
    return total


@nb.njit(cache=True, nogil=True)
def greedy_kernel(w, rows, cols, assign, row_used, col_used):
    """Greedy matching on ``w[:rows, :cols]``; ties go to smaller (row, col).

    ``assign[i]`` receives the column for row ``i`` or -1; the used-masks need
    ``rows`` and ``cols`` booleans. Repeated row-major arg-max scans pick the
    same cells as a stable descending sort without allocating per call.
    """
    for i in range(rows):
        row_used[i] = False
        assign[i] = -1
    for j in range(cols):
        col_used[j] = False
    need = min(rows, cols)
    total = 0.0
    for _ in range(need):
        best = -1.0
        bi = -1
        bj = -1
        for i in range(rows):
            if row_used[i]:
                continue
            for j in range(cols):
                if not col_used[j] and w[i, j] > best:
                    best = w[i, j]
                    bi = i
                    bj = j
        row_used[bi] = True
        col_used[bj] = True
        assign[bi] = bj
        total += best
    return total


def _as_grid(grid) -> np.ndarray:
    w = np.asarray(grid, dtype=np.float64)
    if w.ndim == 1:
        w = w.reshape(1, -1) if w.size else w.reshape(0, 0)
    if w.ndim != 2:
        raise ValueError("weight grid must be two-dimensional")
    if w.size and (np.isnan(w).any() or w.min() < 0.0 or w.max() > 1.0):
        raise ValueError("weights must lie in [0, 1]")
    return np.ascontiguousarray(w)


def exact_matching(grid) -> MatchResult:
    """Optimal matching of cardinality ``min(rows, cols)``.

    >>> exact_matching([[1.0, 0.9], [0.9, 0.1]]).weight
    1.8
    """
    w = _as_grid(grid)
    rows, cols = w.shape
    if rows == 0 or cols == 0:
        return MatchResult(0.0, [])
    transpose = rows > cols
    r, c = (cols, rows) if transpose else (rows, cols)
    assign = np.empty(r, dtype=np.int64)
    buf = c + 1
    total = hungarian_kernel(
        w, r, c, transpose, assign,
        np.empty(r + 1), np.empty(buf), np.empty(buf, dtype=np.int64),
        np.empty(buf, dtype=np.int64), np.empty(buf), np.empty(buf, dtype=np.bool_),
    )
    if transpose:
        pairs = sorted((int(assign[i]), i) for i in range(r))
    else:
        pairs = [(i, int(assign[i])) for i in range(r)]
    return MatchResult(float(total), pairs)


def greedy_matching(grid) -> MatchResult:
    """Greedy 1/2-approximate matching.

    >>> greedy_matching([[1.0, 0.9], [0.9, 0.1]]).weight
    1.1
    """
    w = _as_grid(grid)
    rows, cols = w.shape
    if rows == 0 or cols == 0:
        return MatchResult(0.0, [])
    assign = np.empty(rows, dtype=np.int64)
    total = greedy_kernel(
        w, rows, cols, assign,
        np.empty(rows, dtype=np.bool_), np.empty(cols, dtype=np.bool_),
    )
    pairs = [(i, int(assign[i])) for i in range(rows) if assign[i] >= 0]
    return MatchResult(float(total), pairs)


def match(grid, mode: str = EXACT) -> MatchResult:
    if mode == EXACT:
        return exact_matching(grid)
    if mode == GREEDY:
        return greedy_matching(grid)
    raise ValueError(f"unknown matching mode {mode!r}")
