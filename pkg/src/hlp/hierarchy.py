"""Hierarchical label propagation: alternate LP and community-graph coarsening."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from hlp._kernels import coarsen
from hlp.graph import Graph
from hlp.labelprop import (Assignment, LpParams, compact_labels, level_rng,
                           run_propagation)


class InvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class LevelStats:
    nodes: int
    edges: int
    communities: int
    iterations: int
    elapsed: float


@dataclass(frozen=True)
class Level:
    """One round: an assignment over the previous graph and the graph it induces."""

    assignment: Assignment
    supergraph: Graph
    stats: LevelStats


@dataclass
class Hierarchy:
    base: Graph
    levels: list[Level] = field(default_factory=list)
    params: Optional[LpParams] = None

    def __len__(self):
        return len(self.levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def project(self, t: int) -> Assignment:
        return project_to_base(self, t)


@dataclass(frozen=True, eq=False)
class CompressedHierarchy:
    """Level-1 labels for every base node plus one merge map per later level.

    ``merges[i][c]`` is the level ``i+2`` community of level ``i+1`` community c.
    """

    first: np.ndarray
    merges: tuple[np.ndarray, ...]

    @property
    def depth(self) -> int:
        return 0 if self.first is None else 1 + len(self.merges)

    @property
    def nbytes(self) -> int:
        if self.first is None:
            return 0
        return self.first.nbytes + sum(m.nbytes for m in self.merges)


def _crossing_pairs(g: Graph, labels: np.ndarray, k: int, lo: int, hi: int):
    """Community pairs (p<q) of edges whose smaller endpoint is in [lo, hi), deduplicated."""
    start, stop = g.offsets[lo], g.offsets[hi]
    src = np.repeat(np.arange(lo, hi, dtype=np.int64), np.diff(g.offsets[lo:hi + 1]))
    dst = g.neighbors[start:stop]
    mask = src < dst
    cs, cd = labels[src[mask]], labels[dst[mask]]
    cross = cs != cd
    p = np.minimum(cs[cross], cd[cross])
    q = np.maximum(cs[cross], cd[cross])
    return np.unique(p * np.int64(k) + q)


def create_super_graph(g: Graph, a: Assignment, workers: int = 1) -> Graph:
    """Community graph: one node per community, an edge wherever some edge of ``g`` crosses.

    Sequentially this is one linear pass. With ``workers > 1`` the
    source-node range is split into contiguous blocks whose crossing pairs
    are collected in threads and merged; the result is identical.
    """
    if len(a) != g.n:
        raise ValueError(f"assignment covers {len(a)} nodes, graph has {g.n}")
    labels = a.labels
    if workers <= 1 or g.n < 2 * workers:
        offsets, nbrs = coarsen(g.offsets, g.neighbors, labels, a.k)
        return Graph(n=a.k, m=int(nbrs.size // 2), offsets=offsets, neighbors=nbrs)
    bounds = np.linspace(0, g.n, workers + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda b: _crossing_pairs(g, labels, a.k, b[0], b[1]),
                              zip(bounds[:-1], bounds[1:])))
    keys = np.unique(np.concatenate(parts))
    p, q = np.divmod(keys, np.int64(max(a.k, 1)))
    return Graph.from_arrays(p, q, a.k)


def build_hierarchy(g: Graph, params: LpParams = LpParams(), workers: int = 1) -> Hierarchy:
    """Repeat LP + coarsening until the community graph has fewer than two nodes.

    Also stops when a round merges nothing (possible once the community
    graph has no edges), since further rounds would repeat it forever.
    """
    h = Hierarchy(base=g, params=params)
    current = g
    t = 0
    while current.n > 0:
        t += 1
        tic = time.perf_counter()
        run = run_propagation(current, params, rng=level_rng(params.seed, t))
        sup = create_super_graph(current, run.assignment, workers=workers)
        elapsed = time.perf_counter() - tic
        stats = LevelStats(nodes=current.n, edges=current.m, communities=run.assignment.k,
                           iterations=run.iterations, elapsed=elapsed)
        h.levels.append(Level(assignment=run.assignment, supergraph=sup, stats=stats))
        if sup.n < 2 or sup.n == current.n:
            break
        current = sup
    return h


def _compose(h: Hierarchy, t: int) -> np.ndarray:
    labels = h.levels[0].assignment.labels
    for level in h.levels[1:t]:
        labels = level.assignment.labels[labels]
    return labels


def project_to_base(h: Hierarchy, t: int) -> Assignment:
    """Level-``t`` communities (1-based) as an assignment over base nodes."""
    if not 1 <= t <= len(h.levels):
        raise IndexError(f"level {t} out of range 1..{len(h.levels)}")
    return compact_labels(_compose(h, t))


def compress(h: Hierarchy) -> CompressedHierarchy:
    if not h.levels:
        return CompressedHierarchy(first=None, merges=())
    return CompressedHierarchy(
        first=np.array(h.levels[0].assignment.labels),
        merges=tuple(np.array(lv.assignment.labels) for lv in h.levels[1:]))


def expand(c: CompressedHierarchy) -> list[Assignment]:
    """Base-node assignment for every level, in level order."""
    if c.first is None:
        return []
    out = []
    labels = c.first
    out.append(compact_labels(labels))
    for merge in c.merges:
        labels = merge[labels]
        out.append(compact_labels(labels))
    return out


def check_hierarchy(h: Hierarchy) -> None:
    """Raise InvariantError if the hierarchy breaks any structural guarantee."""
    problems = []
    prev = h.base
    for t, level in enumerate(h.levels, start=1):
        a, sup = level.assignment, level.supergraph
        if len(a) != prev.n:
            problems.append(f"level {t}: assignment length {len(a)} != {prev.n}")
        if a.k and (a.labels.min() < 0 or a.labels.max() >= a.k
                    or np.unique(a.labels).size != a.k):
            problems.append(f"level {t}: labels not compact")
        if sup.n != a.k:
            problems.append(f"level {t}: supergraph has {sup.n} nodes, {a.k} communities")
        if sup.n > prev.n or sup.m > prev.m:
            problems.append(f"level {t}: graph grew ({prev.n},{prev.m}) -> ({sup.n},{sup.m})")
        prev = sup
    if len(h.levels) > max(h.base.n, 1):
        problems.append(f"{len(h.levels)} levels for {h.base.n} nodes")
    if problems:
        raise InvariantError("; ".join(problems))
