"""Registry and local cache for the benchmark networks.

Files live under ``$H2INDEX_DATA_DIR`` (default ``~/.cache/h2index``). For each
dataset the cache holds the raw download, a ``.sha256`` digest and a
normalized ``.txt`` edge list. A registry entry pins a digest when one is
known; otherwise the digest is recorded on first fetch and enforced afterwards.
"""
from __future__ import annotations

import hashlib
import io
import os
import re
import urllib.error
import urllib.request
import warnings
import zipfile
from dataclasses import dataclass, replace
from pathlib import Path

from .graph import Graph, GraphError, largest_connected_component, load_edge_list, write_edge_list

ENV_VAR = "H2INDEX_DATA_DIR"


class DatasetError(RuntimeError):
    pass


class UnknownDatasetError(DatasetError, KeyError):
    def __str__(self) -> str:
        return f"unknown dataset {self.args[0]!r}; known: {', '.join(sorted(REGISTRY))}"


class DigestMismatchError(DatasetError):
    pass


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    url: str | None
    fmt: str  # "edges", "edges-gz" or "gml-zip"
    expected_nodes: int
    expected_edges: int
    take_lcc: bool = False
    sha256: str | None = None
    note: str = ""


REGISTRY: dict[str, DatasetSpec] = {
    s.name: s
    for s in [
        DatasetSpec(
            "cond-mat", "http://www-personal.umich.edu/~mejn/netdata/cond-mat.zip", "gml-zip",
            13861, 44619, take_lcc=True,
            note="condensed-matter co-authorship graph, largest component",
        ),
        DatasetSpec(
            "ca-condmat", "https://snap.stanford.edu/data/ca-CondMat.txt.gz", "edges-gz",
            13861, 44619,
            note="1993-2003 co-authorship graph; larger than the published counts",
        ),
        DatasetSpec("buzznet", None, "edges", 101163, 2763066, note="no public mirror known"),
        DatasetSpec("digg", None, "edges", 261489, 1536577, note="no public mirror known"),
        DatasetSpec("foursquare", None, "edges", 639014, 3214985, note="no public mirror known"),
    ]
}


def data_dir() -> Path:
    return Path(os.environ.get(ENV_VAR) or Path.home() / ".cache" / "h2index")


def spec(name: str) -> DatasetSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise UnknownDatasetError(name) from None


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


_GML_EDGE = re.compile(r"edge\s*\[(.*?)\]", re.S)
_GML_KEY = re.compile(r"\b(source|target)\s+(-?\d+)")


def gml_edges(text: str) -> list[tuple[int, int]]:
    """Source/target pairs of every ``edge [...]`` block in a GML document."""
    out = []
    for block in _GML_EDGE.findall(text):
        kv = dict(_GML_KEY.findall(block))
        if "source" not in kv or "target" not in kv:
            raise DatasetError("GML edge without source/target")
        out.append((int(kv["source"]), int(kv["target"])))
    return out


def normalize(raw: bytes, fmt: str) -> Graph:
    if fmt in ("edges", "edges-gz"):
        g, _ = load_edge_list(raw)
        return g
    if fmt == "gml-zip":
        with zipfile.ZipFile(io.BytesIO(raw)) as zf:
            member = next(n for n in zf.namelist() if n.endswith(".gml"))
            text = zf.read(member).decode("utf-8", "replace")
        lines = "".join(f"{a} {b}\n" for a, b in gml_edges(text))
        g, _ = load_edge_list(lines.encode())
        return g
    raise DatasetError(f"unsupported format {fmt!r}")


@dataclass(frozen=True)
class FetchResult:
    name: str
    path: Path | None
    sha256: str | None
    nodes: int | None = None
    edges: int | None = None
    expected_nodes: int | None = None
    expected_edges: int | None = None
    status: str = "ok"  # ok, skipped
    message: str = ""

    @property
    def counts_match(self) -> bool:
        return (self.nodes, self.edges) == (self.expected_nodes, self.expected_edges)

    def to_dict(self) -> dict:
        return {
            "name": self.name, "path": str(self.path) if self.path else None, "sha256": self.sha256,
            "nodes": self.nodes, "edges": self.edges,
            "expected_nodes": self.expected_nodes, "expected_edges": self.expected_edges,
            "counts_match": self.counts_match if self.nodes is not None else None,
            "status": self.status, "message": self.message,
        }


def _download(url: str, timeout: float) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def verify_raw(name: str, root: Path | None = None) -> bytes:
    """Return the cached raw bytes after checking them against the known digest."""
    s = spec(name)
    root = root or data_dir()
    raw_path, dig_path = root / f"{name}.raw", root / f"{name}.sha256"
    raw = raw_path.read_bytes()
    want = s.sha256 or (dig_path.read_text().split()[0] if dig_path.exists() else None)
    got = _sha256(raw)
    if want is not None and got != want:
        raise DigestMismatchError(f"{name}: cached file digest {got} does not match {want}")
    return raw


def fetch(name: str, *, root: Path | None = None, timeout: float = 60.0, downloader=_download) -> FetchResult:
    """Make ``name`` available as a normalized edge list in the cache.

    A cached raw file is reused after digest verification. An unreachable
    source is a warning and a ``skipped`` result; a digest mismatch raises.
    """
    s = spec(name)
    root = root or data_dir()
    root.mkdir(parents=True, exist_ok=True)
    raw_path, dig_path = root / f"{name}.raw", root / f"{name}.sha256"
    if raw_path.exists():
        raw = verify_raw(name, root)
    else:
        if s.url is None:
            msg = f"{name}: {s.note}; place the edge list at {raw_path}"
            warnings.warn(msg, stacklevel=2)
            return FetchResult(name, None, None, status="skipped", message=msg,
                               expected_nodes=s.expected_nodes, expected_edges=s.expected_edges)
        try:
            raw = downloader(s.url, timeout)
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            msg = f"{name}: source unreachable ({exc})"
            warnings.warn(msg, stacklevel=2)
            return FetchResult(name, None, None, status="skipped", message=msg,
                               expected_nodes=s.expected_nodes, expected_edges=s.expected_edges)
        if s.sha256 is not None and _sha256(raw) != s.sha256:
            raise DigestMismatchError(f"{name}: downloaded digest {_sha256(raw)} does not match {s.sha256}")
        raw_path.write_bytes(raw)
    if not dig_path.exists():
        dig_path.write_text(f"{_sha256(raw)}  {raw_path.name}\n")
    try:
        g = normalize(raw, s.fmt)
    except (GraphError, zipfile.BadZipFile, StopIteration) as exc:
        raise DatasetError(f"{name}: cannot normalize raw file: {exc}") from exc
    if s.take_lcc:
        g = largest_connected_component(g)
    out = root / f"{name}.txt"
    with open(out, "w") as fh:
        write_edge_list(g, fh)
    res = FetchResult(name, out, _sha256(raw), g.node_count, g.edge_count,
                      s.expected_nodes, s.expected_edges)
    if not res.counts_match:
        res = replace(res, message=(
            f"{name}: {g.node_count} nodes / {g.edge_count} edges, "
            f"published {s.expected_nodes} / {s.expected_edges}"))
    return res


def local_path(name: str, root: Path | None = None) -> Path | None:
    """Normalized edge list for ``name`` if it is cached and its digest still verifies."""
    root = root or data_dir()
    p = root / f"{name}.txt"
    if not (root / f"{name}.raw").exists():
        return None
    verify_raw(name, root)
    if not p.exists():
        fetch(name, root=root)
    return p
