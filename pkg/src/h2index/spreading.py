"""Discrete-time SIR Monte Carlo for per-node spreading power.

Each step, every infected node makes one independent infection attempt on
each susceptible neighbour (success probability ``lam``), then recovers with
probability ``mu``. A node infected at step ``t`` first spreads at ``t + 1``.
Spreading power of a seed is the final number of recovered nodes, seed
included.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .graph import Graph

S, I, R = 0, 1, 2


class DegenerateGraphError(ValueError):
    pass


@dataclass(frozen=True)
class SirConfig:
    infection_probability: float
    recovery_probability: float = 1.0
    runs_per_seed: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.infection_probability <= 1.0:
            raise ValueError("infection_probability must lie in [0, 1]")
        if not 0.0 < self.recovery_probability <= 1.0:
            raise ValueError("recovery_probability must lie in (0, 1]")
        if self.runs_per_seed < 1:
            raise ValueError("runs_per_seed must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SpreadingOutcome:
    spreading_power: np.ndarray
    std_dev: np.ndarray
    config: SirConfig | None = None


def epidemic_threshold(g: Graph) -> float:
    """Mean-field threshold ``<d> / (<d^2> - <d>)``."""
    d = g.degrees.astype(np.float64)
    if len(d) == 0:
        raise DegenerateGraphError("degenerate degree distribution: empty graph")
    m1 = d.mean()
    m2 = (d * d).mean()
    if m2 <= m1:
        raise DegenerateGraphError("degenerate degree distribution: <d^2> <= <d>")
    return float(m1 / (m2 - m1))


def default_lambda(g: Graph) -> float:
    """Threshold plus 0.01, the infection probability used for ranking validation."""
    return epidemic_threshold(g) + 0.01


def sir_single_run(
    g: Graph,
    seed_node: int,
    lam: float,
    rng: np.random.Generator,
    mu: float = 1.0,
    history: list | None = None,
) -> int:
    """One SIR realisation driven by a numpy Generator; returns the recovered count.

    When ``history`` is a list, ``(susceptible, infected, recovered)`` counts
    are appended after initialisation and after every step.
    """
    g._check(seed_node)
    n = g.node_count
    state = np.zeros(n, dtype=np.int8)
    state[seed_node] = I
    infected = [seed_node]
    n_rec = 0
    if history is not None:
        history.append((n - 1, 1, 0))
    indptr, indices = g.indptr, g.indices
    while infected:
        newly = []
        for u in infected:
            for v in indices[indptr[u]:indptr[u + 1]]:
                if state[v] == S and rng.random() < lam:
                    state[v] = I
                    newly.append(int(v))
        still = []
        for u in infected:
            if mu >= 1.0 or rng.random() < mu:
                state[u] = R
                n_rec += 1
            else:
                still.append(u)
        infected = still + newly
        if history is not None:
            history.append((n - n_rec - len(infected), len(infected), n_rec))
    return n_rec


# counter-based stream: splitmix64 keyed on (seed, node, run)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(inline="always")
def _stream_key(seed, node, run):
    k = _mix64(seed ^ _GOLDEN)
    k = _mix64(k ^ (np.uint64(node) * _GOLDEN))
    return _mix64(k ^ (np.uint64(run) + np.uint64(0x632BE59BD9B4E019)))


@njit(inline="always")
def _uniform(key, ctr):
    return (_mix64(key + ctr * _GOLDEN) >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _run_kernel(indptr, indices, seed_node, lam, mu, key, state, cur, nxt):
    # state must be all-S on entry; the caller resets it afterwards
    ctr = np.uint64(0)
    one = np.uint64(1)
    state[seed_node] = 1
    cur[0] = seed_node
    ncur = 1
    nrec = 0
    while ncur > 0:
        nn = 0
        for a in range(ncur):
            u = cur[a]
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if state[v] == 0:
                    ctr += one
                    if _uniform(key, ctr) < lam:
                        state[v] = 1
                        nxt[nn] = v
                        nn += 1
        # survivors stay at the front of cur, new infections follow
        keep = 0
        for a in range(ncur):
            u = cur[a]
            rec = True
            if mu < 1.0:
                ctr += one
                rec = _uniform(key, ctr) < mu
            if rec:
                state[u] = 2
                nrec += 1
            else:
                cur[keep] = u
                keep += 1
        for b in range(nn):
            cur[keep + b] = nxt[b]
        ncur = keep + nn
    return nrec


@njit(cache=True, parallel=True)
def _all_kernel(indptr, indices, lam, mu, runs, seed):
    n = len(indptr) - 1
    mean = np.zeros(n)
    std = np.zeros(n)
    for s in prange(n):
        state = np.zeros(n, dtype=np.int8)
        cur = np.empty(n, dtype=np.int64)
        nxt = np.empty(n, dtype=np.int64)
        tot = 0.0
        tot2 = 0.0
        for r in range(runs):
            key = _stream_key(seed, np.uint64(s), np.uint64(r))
            x = _run_kernel(indptr, indices, s, lam, mu, key, state, cur, nxt)
            state[:] = 0
            tot += x
            tot2 += x * x
        m = tot / runs
        mean[s] = m
        if runs > 1:
            var = (tot2 - runs * m * m) / (runs - 1)
            std[s] = np.sqrt(var) if var > 0 else 0.0
    return mean, std


def keyed_single_run(g: Graph, seed_node: int, lam: float, rng_seed: int, run_index: int,
                     mu: float = 1.0) -> int:
    """One realisation on the ``(rng_seed, seed_node, run_index)`` substream.

    Reproduces exactly the run that :func:`spreading_power_all` performs for
    that seed node and run index.
    """
    g._check(seed_node)
    n = g.node_count
    key = np.uint64(_key(rng_seed, seed_node, run_index))
    state = np.zeros(n, dtype=np.int8)
    return int(_run_kernel(g.indptr, g.indices, seed_node, lam, mu, key, state,
                           np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64)))


@njit(cache=True)
def _key_nb(seed, node, run):
    return _stream_key(seed, node, run)


def _key(seed, node, run):
    return _key_nb(np.uint64(seed), np.uint64(node), np.uint64(run))


def spreading_power_all(g: Graph, cfg: SirConfig, threads: int | None = None) -> SpreadingOutcome:
    """Mean and sample standard deviation of the recovered count from every seed node.

    Output is bit-identical for a given graph and config regardless of ``threads``.
    """
    if threads is not None:
        numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))
    mean, std = _all_kernel(
        g.indptr, g.indices, float(cfg.infection_probability),
        float(cfg.recovery_probability), int(cfg.runs_per_seed), np.uint64(cfg.rng_seed),
    )
    return SpreadingOutcome(mean, std, cfg)
