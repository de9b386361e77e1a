"""Hill-climbing crawls towards the highest-h2-index nodes using local queries only.

Two move rules are provided:

``index``
    Move to the unvisited neighbour with the largest h2-index, provided it is
    at least the current node's. Ties go to the last qualifying neighbour in
    ascending id order. At a local maximum that is not a top node, jump to a
    uniformly random unvisited neighbour and spend one restart.
``index_degree``
    As ``index``, but among the unvisited neighbours sharing the best h2-index
    prefer the largest degree, and jump deterministically to the unvisited
    neighbour of largest degree.

Random jumps draw ``sorted(candidates)[rng.integers(len(candidates))]`` from a
per-start generator ``numpy.random.default_rng([rng_seed, start])``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .coreness import NodeMetrics, h_of_list
from .graph import Graph

VARIANTS = ("index", "index_degree")


@dataclass(frozen=True)
class CrawlConfig:
    """Crawl parameters.

    ``max_index=None`` runs without an oracle: the crawl never declares
    success, spends its whole restart budget and reports the best node seen.
    ``stop_on_hit`` ends the walk as soon as a top node is current; with it off
    the walk keeps climbing across equally-ranked top nodes and only stops at a
    local maximum, as the plain reference loop does.
    """

    repeat_limit: int = 50
    max_index: int | None = None
    variant: str = "index"
    rng_seed: int = 0
    stop_on_hit: bool = True
    lazy: bool = False

    def __post_init__(self):
        if self.repeat_limit < 0:
            raise ValueError("repeat_limit must be >= 0")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")


@dataclass(frozen=True)
class CrawlRecord:
    start_node: int
    steps: int
    restarts_used: int
    succeeded: bool
    terminal_node: int
    visited_count: int
    dead_end: bool = False
    best_node: int = -1
    path: tuple = field(default=(), repr=False)
    h2_evaluations: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("path")
        return d


class LocalH2:
    """On-demand h- and h2-index from neighbourhood queries, with caching.

    Counts how many h2 values were actually computed.
    """

    def __init__(self, g: Graph):
        self.g = g
        self._deg = g.degrees
        self._h: dict[int, int] = {}
        self._h2: dict[int, int] = {}
        self.evaluations = 0

    def degree(self, v: int) -> int:
        return int(self._deg[v])

    def h_index(self, v: int) -> int:
        h = self._h.get(v)
        if h is None:
            h = h_of_list(self._deg[self.g.neighbors(v)])
            self._h[v] = h
        return h

    def h2(self, v: int) -> int:
        h2 = self._h2.get(v)
        if h2 is None:
            h2 = h_of_list([self.h_index(int(w)) for w in self.g.neighbors(v)])
            self._h2[v] = h2
            self.evaluations += 1
        return h2

    __getitem__ = h2


def lazy_h2_frontier(g: Graph, current: int, h2_current: int, visited=(), degrees=None) -> list[int]:
    """Unvisited neighbours of ``current`` whose degree is at least ``h2_current``.

    A neighbour of smaller degree cannot reach the current node's h2-index, so
    only these candidates need their h2-index computed.
    """
    deg = g.degrees if degrees is None else degrees
    return [int(v) for v in g.neighbors(current) if v not in visited and deg[v] >= h2_current]


def _crawl(g: Graph, h2, deg, start: int, cfg: CrawlConfig, rng, frontier: Callable) -> CrawlRecord:
    index_degree = cfg.variant == "index_degree"
    max_index = cfg.max_index
    visited = {start}
    path = [start]
    cur = start
    steps = 0
    restarts = 0
    succeeded = False
    dead_end = False
    while True:
        if cfg.stop_on_hit and max_index is not None and h2[cur] == max_index:
            succeeded = True
            break
        cand = frontier(cur, visited)
        nxt = cur
        for v in cand:
            if h2[v] >= h2[nxt]:
                nxt = v
        if index_degree and nxt != cur:
            best = h2[nxt]
            for v in cand:
                if h2[v] == best and deg[v] >= deg[nxt]:
                    nxt = v
        if nxt == cur:
            if max_index is not None and h2[cur] == max_index:
                succeeded = True
                break
            if restarts >= cfg.repeat_limit:
                break
            choices = [int(v) for v in g.neighbors(cur) if v not in visited]
            if not choices:
                dead_end = True
                break
            if index_degree:
                nxt = choices[0]
                for v in choices:
                    if deg[v] >= deg[nxt]:
                        nxt = v
            else:
                nxt = choices[int(rng.integers(len(choices)))]
            restarts += 1
        visited.add(nxt)
        path.append(nxt)
        cur = nxt
        steps += 1
    best_node = path[0]
    for v in path:
        if h2[v] > h2[best_node]:
            best_node = v
    evals = h2.evaluations if isinstance(h2, LocalH2) else 0
    return CrawlRecord(
        start_node=start, steps=steps, restarts_used=restarts, succeeded=succeeded,
        terminal_node=cur, visited_count=len(visited), dead_end=dead_end,
        best_node=int(best_node), path=tuple(path), h2_evaluations=evals,
    )


def start_rng(cfg: CrawlConfig, start: int) -> np.random.Generator:
    return np.random.default_rng([cfg.rng_seed, start])


def _context(g: Graph, metrics: NodeMetrics | None, lazy: bool):
    deg = g.degrees
    if lazy:
        local = LocalH2(g)

        def frontier(cur, visited):
            return lazy_h2_frontier(g, cur, local[cur], visited, deg)

        return local, deg.tolist(), frontier
    if metrics is None:
        raise ValueError("metrics are required unless cfg.lazy is set")
    adj = g.indices.tolist()
    ptr = g.indptr.tolist()

    def frontier(cur, visited):
        return [v for v in adj[ptr[cur]:ptr[cur + 1]] if v not in visited]

    return metrics.h2_index.tolist(), deg.tolist(), frontier


def crawl(g: Graph, metrics: NodeMetrics | None, start: int, cfg: CrawlConfig) -> CrawlRecord:
    """Run one crawl from ``start`` with the configured variant.

    With ``cfg.lazy`` the h2-index is evaluated from the graph on demand and
    only for frontier candidates, so ``metrics`` may be ``None``. The resulting
    trace is identical to the precomputed one.
    """
    g._check(start)
    h2, deg, frontier = _context(g, metrics, cfg.lazy)
    return _crawl(g, h2, deg, start, cfg, start_rng(cfg, start), frontier)


def crawl_index(g: Graph, metrics: NodeMetrics | None, start: int, cfg: CrawlConfig) -> CrawlRecord:
    if cfg.variant != "index":
        raise ValueError("crawl_index requires variant='index'")
    return crawl(g, metrics, start, cfg)


def crawl_index_degree(g: Graph, metrics: NodeMetrics | None, start: int,
                       cfg: CrawlConfig) -> CrawlRecord:
    if cfg.variant != "index_degree":
        raise ValueError("crawl_index_degree requires variant='index_degree'")
    return crawl(g, metrics, start, cfg)


@dataclass(frozen=True)
class CrawlSummary:
    runs: int
    avg_steps: float
    std_steps: float
    avg_restarts: float
    failed_pct: float
    avg_steps_succeeded: float

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(records: Sequence[CrawlRecord]) -> CrawlSummary:
    """Averages over all runs, failed ones included; ``std_steps`` is the population std."""
    if not records:
        return CrawlSummary(0, 0.0, 0.0, 0.0, 0.0, 0.0)
    steps = np.array([r.steps for r in records], dtype=np.float64)
    ok = np.array([r.succeeded for r in records])
    restarts = np.array([r.restarts_used for r in records], dtype=np.float64)
    return CrawlSummary(
        runs=len(records),
        avg_steps=float(steps.mean()),
        std_steps=float(steps.std()),
        avg_restarts=float(restarts.mean()),
        failed_pct=float(100.0 * (~ok).mean()),
        avg_steps_succeeded=float(steps[ok].mean()) if ok.any() else 0.0,
    )


def crawl_all(g: Graph, metrics: NodeMetrics, cfg: CrawlConfig) -> tuple[CrawlSummary, list[CrawlRecord]]:
    """Crawl from every node whose h2-index is below the maximum.

    ``cfg.max_index`` defaults to the global maximum when unset.
    """
    if cfg.max_index is None:
        cfg = replace(cfg, max_index=metrics.max_h2)
    starts = np.flatnonzero(metrics.h2_index < cfg.max_index)
    if cfg.lazy:
        records = [crawl(g, metrics, int(s), cfg) for s in starts]
    else:
        h2, deg, frontier = _context(g, metrics, False)
        records = [_crawl(g, h2, deg, int(s), cfg, start_rng(cfg, int(s)), frontier) for s in starts]
    return summarize(records), records


def top_nodes(metrics: NodeMetrics) -> np.ndarray:
    return np.flatnonzero(metrics.h2_index == metrics.max_h2)


def top_nodes_connected(g: Graph, metrics: NodeMetrics) -> bool:
    """Whether the subgraph induced by the maximum-h2 nodes is connected."""
    top = top_nodes(metrics)
    if len(top) == 0:
        raise ValueError("graph has no nodes")
    members = set(top.tolist())
    seen = {int(top[0])}
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u).tolist():
            if v in members and v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(members)
