"""Undirected simple graphs in CSR form, plus edge-list / Matrix Market ingestion."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Optional, Union

import numpy as np

from hlp._kernels import min_degree_peel

FORMATS = ("edgelist", "mtx")


class ParseError(ValueError):
    """Malformed input line. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class EmptyInputError(ParseError):
    pass


def _id_dtype(n: int):
    # int32 ids halve the memory traffic of the propagation sweeps
    return np.int32 if n < 2**31 else np.int64


@dataclass(frozen=True)
class EdgeList:
    pairs: list[tuple[int, int]]
    index_base: int = 0
    # node count declared by an mtx size line, if any
    declared_n: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on nodes 0..n-1.

    ``neighbors[offsets[v]:offsets[v+1]]`` is the sorted neighbor list of v.
    Both arrays are read-only.
    """

    n: int
    m: int
    offsets: np.ndarray
    neighbors: np.ndarray

    def __post_init__(self):
        self.offsets.setflags(write=False)
        self.neighbors.setflags(write=False)

    @classmethod
    def from_arrays(cls, src, dst, n: int) -> "Graph":
        """Build from parallel endpoint arrays; drops loops, merges duplicates, symmetrizes."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        keep = src != dst
        src, dst = src[keep], dst[keep]
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        a = np.concatenate([src, dst])
        b = np.concatenate([dst, src])
        keys = np.unique(a * np.int64(max(n, 1)) + b)
        a, b = np.divmod(keys, np.int64(max(n, 1)))
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(a, minlength=n), out=offsets[1:])
        return cls(n=n, m=int(b.size // 2), offsets=offsets, neighbors=b.astype(_id_dtype(n)))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: Optional[int] = None) -> "Graph":
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if n is None:
            n = int(arr.max()) + 1 if arr.size else 0
        return cls.from_arrays(arr[:, 0], arr[:, 1], n)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def degree(self, v: int) -> int:
        return int(self.offsets[v + 1] - self.offsets[v])

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints (u, v) of every edge once, with u < v, in CSR order."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = src < self.neighbors
        return src[mask], self.neighbors[mask]

    def edges(self) -> list[tuple[int, int]]:
        u, v = self.edge_arrays()
        return list(zip(u.tolist(), v.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and self.m == other.m
                and np.array_equal(self.offsets, other.offsets)
                and np.array_equal(self.neighbors, other.neighbors))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class CoreDecomposition:
    core_number: np.ndarray
    peel_order: np.ndarray
    # not-yet-removed neighbor count of peel_order[i] at its removal
    removal_degree: np.ndarray

    @property
    def degeneracy(self) -> int:
        return int(self.core_number.max()) if self.core_number.size else 0


def _as_text(stream) -> IO[str]:
    if isinstance(stream, (bytes, bytearray)):
        return io.StringIO(stream.decode("utf-8"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8")


def parse_edge_list(stream, format: str = "edgelist",
                    index_base: Optional[int] = None) -> EdgeList:
    """Read (u, v) pairs from a text or byte stream.

    Lines starting with ``%`` or ``#`` are comments; columns past the second
    (weights, timestamps) are ignored. For ``mtx`` the first non-comment line
    is the ``rows cols nnz`` size line and ids are 1-based. Edge lists are
    0-based unless ``index_base=1`` is passed and no id 0 occurs.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    text = _as_text(stream)
    pairs: list[tuple[int, int]] = []
    declared_n = None
    need_size_line = format == "mtx"
    min_id = None
    for lineno, line in enumerate(text, start=1):
        line = line.strip()
        if not line or line[0] in "%#":
            continue
        fields = line.split()
        if need_size_line:
            try:
                dims = [int(x) for x in fields[:3]]
            except ValueError:
                raise ParseError(f"bad size line {line!r}", lineno) from None
            if len(dims) < 2:
                raise ParseError(f"bad size line {line!r}", lineno)
            declared_n = max(dims[0], dims[1])
            need_size_line = False
            continue
        if len(fields) < 2:
            raise ParseError(f"expected two node ids, got {line!r}", lineno)
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative node id in {line!r}", lineno)
        lo = u if u < v else v
        if min_id is None or lo < min_id:
            min_id = lo
        pairs.append((u, v))
    if not pairs:
        raise EmptyInputError("no edges in input")

    if format == "mtx":
        if min_id == 0:
            raise ParseError("node id 0 in 1-based mtx data")
        base = 1
    else:
        # a declared 1-based override only holds if id 0 never shows up
        base = 1 if index_base == 1 and min_id != 0 else 0
    return EdgeList(pairs=pairs, index_base=base, declared_n=declared_n)


def build_graph(edges: EdgeList, n: Optional[int] = None) -> Graph:
    """Simple undirected graph from parsed pairs.

    Node count is ``max id - index_base + 1``, raised to ``n`` or the mtx
    declared size when those are larger.
    """
    arr = np.asarray(edges.pairs, dtype=np.int64).reshape(-1, 2) - edges.index_base
    size = int(arr.max()) + 1 if arr.size else 0
    for hint in (n, edges.declared_n):
        if hint is not None:
            size = max(size, int(hint))
    return Graph.from_arrays(arr[:, 0], arr[:, 1], size)


def read_graph(path: Union[str, Path], format: Optional[str] = None,
               index_base: Optional[int] = None) -> Graph:
    """Parse and build a graph from a file; format is guessed from the suffix."""
    path = Path(path)
    if format is None:
        format = "mtx" if path.suffix.lower() == ".mtx" else "edgelist"
    with open(path, "rb") as fh:
        return build_graph(parse_edge_list(fh, format, index_base))


def core_decomposition(g: Graph) -> CoreDecomposition:
    order, rdeg = min_degree_peel(g.offsets, g.neighbors)
    core = np.empty(g.n, dtype=np.int64)
    if g.n:
        core[order] = np.maximum.accumulate(rdeg)
    return CoreDecomposition(core_number=core, peel_order=order, removal_degree=rdeg)


def induced_subgraph(g: Graph, nodes) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``nodes`` relabeled 0..len-1; also returns the new->old id map."""
    nodes = np.asarray(nodes, dtype=np.int64)
    local = np.full(g.n, -1, dtype=np.int64)
    local[nodes] = np.arange(nodes.size)
    u, v = g.edge_arrays()
    lu, lv = local[u], local[v]
    keep = (lu >= 0) & (lv >= 0)
    return Graph.from_arrays(lu[keep], lv[keep], int(nodes.size)), nodes
