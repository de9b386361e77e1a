"""Immutable undirected simple graphs in compressed adjacency (CSR) form."""
from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass, field
from typing import IO, Hashable, Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid graph input or query."""


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}: {line!r}")


@dataclass(frozen=True)
class LoadReport:
    nodes: int
    edges: int
    dropped_self_loops: int = 0
    dropped_duplicates: int = 0

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "edges": self.edges,
            "dropped_self_loops": self.dropped_self_loops,
            "dropped_duplicates": self.dropped_duplicates,
        }


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph with dense integer ids ``0 .. n-1``.

    Adjacency is stored as CSR arrays: the neighbours of ``u`` are
    ``indices[indptr[u]:indptr[u + 1]]``, sorted strictly increasing.
    ``labels[i]`` is the external label of internal id ``i``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple = field(default=())
    _label_index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(self.indptr) - 1)))

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def __len__(self) -> int:
        return self.node_count

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"

    def degree(self, u: int) -> int:
        return degree(self, u)

    def neighbors(self, u: int) -> np.ndarray:
        self._check(u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def node_id(self, label: Hashable) -> int:
        """Internal id of an external label (labels are compared as strings)."""
        if self._label_index is None:
            object.__setattr__(
                self, "_label_index", {str(lab): i for i, lab in enumerate(self.labels)}
            )
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise GraphError(f"unknown node label {label!r}") from None

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, in lexicographic order."""
        src = np.repeat(np.arange(self.node_count), self.degrees)
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def _check(self, u) -> None:
        if not 0 <= u < self.node_count:
            raise GraphError(f"node id {u} out of range [0, {self.node_count})")

    def check_invariants(self) -> None:
        """Full scan of the symmetry and simplicity invariants."""
        n = self.node_count
        if self.indptr[0] != 0 or np.any(np.diff(self.indptr) < 0):
            raise GraphError("malformed indptr")
        if len(self.indices) % 2:
            raise GraphError("odd adjacency length")
        if len(self.indices) and (self.indices.min() < 0 or self.indices.max() >= n):
            raise GraphError("neighbour id out of range")
        src = np.repeat(np.arange(n), self.degrees)
        if np.any(src == self.indices):
            raise GraphError("self-loop present")
        # strictly increasing within each row
        step = np.diff(self.indices)
        same_row = np.diff(src) == 0
        if np.any(step[same_row] <= 0):
            raise GraphError("adjacency row not strictly increasing")
        fwd = set(zip(src.tolist(), self.indices.tolist()))
        for u, v in fwd:
            if (v, u) not in fwd:
                raise GraphError(f"asymmetric edge {u}->{v}")


def from_edges(
    edges: Iterable[Sequence[int]] | np.ndarray,
    n: int | None = None,
    labels: Sequence | None = None,
) -> Graph:
    """Build a Graph from integer id pairs, symmetrising and deduplicating."""
    g, _ = _build(np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                             dtype=np.int64).reshape(-1, 2), n, labels)
    return g


def _build(pairs: np.ndarray, n: int | None, labels) -> tuple[Graph, LoadReport]:
    if n is None:
        n = int(pairs.max()) + 1 if len(pairs) else 0
    loops = pairs[:, 0] == pairs[:, 1]
    pairs = pairs[~loops]
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    und = np.unique(np.column_stack([lo, hi]), axis=0) if len(pairs) else pairs
    dups = len(pairs) - len(und)
    src = np.concatenate([und[:, 0], und[:, 1]])
    dst = np.concatenate([und[:, 1], und[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    g = Graph(indptr, dst.astype(np.int64), tuple(labels) if labels is not None else ())
    report = LoadReport(g.node_count, g.edge_count, int(loops.sum()), int(dups))
    return g, report


def _open_text(source) -> IO[str]:
    if isinstance(source, (str, os.PathLike)):
        raw = open(source, "rb")
    elif isinstance(source, (bytes, bytearray)):
        raw = io.BytesIO(source)
    else:
        raw = source
        if isinstance(raw, io.TextIOBase):
            return raw
    head = raw.peek(2)[:2] if hasattr(raw, "peek") else None
    if head is None:
        data = raw.read()
        raw = io.BytesIO(data)
        head = data[:2]
    if head == b"\x1f\x8b":
        raw = gzip.GzipFile(fileobj=raw)
    return io.TextIOWrapper(raw, encoding="utf-8")


def _parse_label(tok: str, numeric: bool):
    if numeric:
        return int(tok)
    return tok


def load_edge_list(source, *, numeric_ids: bool | None = None) -> tuple[Graph, LoadReport]:
    """Parse a whitespace-separated edge list.

    ``source`` may be a path, raw bytes, or a binary/text stream; gzip input is
    detected from its magic bytes. Lines starting with ``#`` or ``%`` and blank
    lines are skipped. Extra columns are not allowed. Internal ids are assigned
    in order of first appearance; labels are kept as ints when every token is an
    integer (or when ``numeric_ids`` is forced) and as strings otherwise.

    Self-loops and repeated edges (in either orientation) are dropped and counted
    in the returned :class:`LoadReport`.
    """
    stream = _open_text(source)
    toks: list[tuple[str, str]] = []
    for lineno, line in enumerate(stream, 1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        parts = s.split()
        if len(parts) != 2:
            raise EdgeListParseError(lineno, s, f"expected 2 tokens, got {len(parts)}")
        if numeric_ids:
            for t in parts:
                try:
                    int(t)
                except ValueError:
                    raise EdgeListParseError(lineno, s, f"unparseable id {t!r}") from None
        toks.append((parts[0], parts[1]))
    if not toks:
        raise GraphError("empty edge list")

    if numeric_ids is None:
        numeric_ids = all(_is_int(a) and _is_int(b) for a, b in toks)
    ids: dict = {}
    pairs = np.empty((len(toks), 2), dtype=np.int64)
    for i, (a, b) in enumerate(toks):
        ka, kb = _parse_label(a, numeric_ids), _parse_label(b, numeric_ids)
        pairs[i, 0] = ids.setdefault(ka, len(ids))
        pairs[i, 1] = ids.setdefault(kb, len(ids))
    return _build(pairs, len(ids), list(ids))


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def write_edge_list(g: Graph, dest: IO[str]) -> None:
    """Write ``g`` as ``label label`` lines, one per undirected edge."""
    labels = g.labels
    for u, v in g.edges().tolist():
        dest.write(f"{labels[u]} {labels[v]}\n")


def degree(g: Graph, u: int) -> int:
    g._check(u)
    return int(g.indptr[u + 1] - g.indptr[u])


def connected_components(g: Graph) -> np.ndarray:
    """Component id per node; components are numbered by their smallest node id."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components as _cc

    n = g.node_count
    mat = csr_matrix((np.ones(len(g.indices), dtype=np.int8), g.indices, g.indptr), shape=(n, n))
    _, comp = _cc(mat, directed=False)
    # relabel so that component order follows first (smallest) member id
    _, first = np.unique(comp, return_index=True)
    remap = np.empty_like(first)
    remap[np.argsort(first)] = np.arange(len(first))
    return remap[comp]


def induced_subgraph(g: Graph, nodes: np.ndarray) -> Graph:
    """Subgraph induced by ``nodes`` with ids re-densified in ascending original order."""
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    newid = np.full(g.node_count, -1, dtype=np.int64)
    newid[nodes] = np.arange(len(nodes))
    e = g.edges()
    keep = (newid[e[:, 0]] >= 0) & (newid[e[:, 1]] >= 0)
    e = newid[e[keep]]
    labels = [g.labels[i] for i in nodes.tolist()]
    sub, _ = _build(e, len(nodes), labels)
    return sub


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component.

    Ties between equally large components go to the one holding the smallest
    node id.
    """
    if g.node_count == 0:
        raise GraphError("empty graph")
    comp = connected_components(g)
    sizes = np.bincount(comp)
    best = int(np.argmax(sizes))  # argmax returns the first, i.e. smallest-min-id, maximum
    return induced_subgraph(g, np.flatnonzero(comp == best))
