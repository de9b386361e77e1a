"""Degree, h-index family and k-shell decomposition.

The h-index operator maps a per-node vector ``x`` to
``y[u] = H(x[v] for v in ngh(u))`` where ``H(l)`` is the largest ``h`` with at
least ``h`` entries ``>= h``. Starting from degrees, one application gives the
h-index, two give the h2-index, and the iteration converges to coreness.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph


@dataclass(frozen=True)
class NodeMetrics:
    degree: np.ndarray
    h_index: np.ndarray
    h2_index: np.ndarray
    shell_index: np.ndarray

    def __len__(self):
        return len(self.degree)

    @property
    def k_max(self) -> int:
        return int(self.shell_index.max()) if len(self.shell_index) else 0

    @property
    def max_h2(self) -> int:
        return int(self.h2_index.max()) if len(self.h2_index) else 0


def h_of_list(values) -> int:
    """Largest ``h`` such that at least ``h`` entries are ``>= h``.

    >>> h_of_list([1, 2, 3, 3, 4, 6, 8, 10])
    4
    >>> h_of_list([])
    0
    """
    vals = np.asarray(values, dtype=np.int64)
    if vals.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if len(vals) and vals.min() < 0:
        raise ValueError("values must be non-negative")
    return int(_h_of_slice(vals, 0, len(vals), np.zeros(len(vals) + 1, dtype=np.int64)))


@njit(cache=True)
def _h_of_slice(vals, start, stop, counts):
    # counting sort with values clamped to the list length
    m = stop - start
    for i in range(m + 1):
        counts[i] = 0
    for i in range(start, stop):
        x = vals[i]
        counts[x if x < m else m] += 1
    tail = 0
    for h in range(m, 0, -1):
        tail += counts[h]
        if tail >= h:
            return h
    return 0


@njit(cache=True)
def _h_iter(indptr, indices, values, out):
    n = len(indptr) - 1
    maxdeg = 0
    for u in range(n):
        d = indptr[u + 1] - indptr[u]
        if d > maxdeg:
            maxdeg = d
    buf = np.empty(maxdeg, dtype=np.int64)
    counts = np.empty(maxdeg + 1, dtype=np.int64)
    changed = 0
    for u in range(n):
        lo = indptr[u]
        hi = indptr[u + 1]
        for i in range(lo, hi):
            buf[i - lo] = values[indices[i]]
        h = _h_of_slice(buf, 0, hi - lo, counts)
        if h != values[u]:
            changed += 1
        out[u] = h
    return changed


def h_iteration(g: Graph, values) -> np.ndarray:
    """One synchronous h-index update: every node reads the frozen input vector."""
    vals = np.ascontiguousarray(values, dtype=np.int64)
    if vals.shape != (g.node_count,):
        raise ValueError(f"expected {g.node_count} values, got shape {vals.shape}")
    out = np.empty_like(vals)
    _h_iter(g.indptr, g.indices, vals, out)
    return out


def h_sequence(g: Graph, max_iter: int | None = None) -> list[np.ndarray]:
    """The h^n vectors from ``h^0 = degree`` until a full pass changes nothing.

    The returned list ends with the fixed point (which equals coreness).
    """
    cur = g.degrees.astype(np.int64)
    seq = [cur]
    it = 0
    while max_iter is None or it < max_iter:
        nxt = np.empty_like(cur)
        changed = _h_iter(g.indptr, g.indices, cur, nxt)
        it += 1
        if changed == 0:
            break
        seq.append(nxt)
        cur = nxt
    return seq


@njit(cache=True)
def _bz_cores(indptr, indices):
    # Batagelj-Zaversnik O(m) bucket decomposition
    n = len(indptr) - 1
    deg = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for u in range(n):
        deg[u] = indptr[u + 1] - indptr[u]
        if deg[u] > maxdeg:
            maxdeg = deg[u]
    bin_ = np.zeros(maxdeg + 1, dtype=np.int64)
    for u in range(n):
        bin_[deg[u]] += 1
    start = 0
    for d in range(maxdeg + 1):
        num = bin_[d]
        bin_[d] = start
        start += num
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    for u in range(n):
        pos[u] = bin_[deg[u]]
        vert[pos[u]] = u
        bin_[deg[u]] += 1
    for d in range(maxdeg, 0, -1):
        bin_[d] = bin_[d - 1]
    if maxdeg >= 0 and n > 0:
        bin_[0] = 0
    for i in range(n):
        v = vert[i]
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_[du] += 1
                deg[u] -= 1
    return deg


def shell_decomposition(g: Graph) -> np.ndarray:
    """Shell index (coreness) of every node in O(m)."""
    if g.node_count == 0:
        return np.zeros(0, dtype=np.int64)
    return _bz_cores(g.indptr, g.indices)


def compute_metrics(g: Graph) -> NodeMetrics:
    deg = g.degrees.astype(np.int64)
    h = h_iteration(g, deg)
    h2 = h_iteration(g, h)
    ks = shell_decomposition(g)
    for a in (deg, h, h2, ks):
        a.setflags(write=False)
    return NodeMetrics(deg, h, h2, ks)


def verify_coreness_identity(g: Graph, shell_index) -> tuple[bool, list[int]]:
    """Check that every node's shell index is the h-index of its neighbours' shell indices.

    Returns ``(ok, violating_node_ids)``. Accepts a :class:`NodeMetrics` or a
    bare shell-index vector.
    """
    ks = shell_index.shell_index if isinstance(shell_index, NodeMetrics) else np.asarray(shell_index)
    bad = np.flatnonzero(h_iteration(g, ks) != ks)
    return len(bad) == 0, bad.tolist()
