"""Modularity and per-community edge counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hlp.graph import Graph
from hlp.labelprop import Assignment


class UndefinedMetricError(ValueError):
    pass


@dataclass(frozen=True)
class CommunityEdgeStats:
    internal: np.ndarray
    external: np.ndarray
    # (i, j) with i < j -> number of edges between communities i and j
    pair_cuts: dict

    @property
    def total_cut(self) -> int:
        return int(sum(self.pair_cuts.values()))


def _check_cover(g: Graph, a: Assignment):
    if len(a) != g.n:
        raise ValueError(f"assignment covers {len(a)} nodes, graph has {g.n}")


def modularity(g: Graph, a: Assignment) -> float:
    """Newman modularity of ``a`` on ``g``.

    Uses the per-community form sum_k [ L_k / m - (D_k / 2m)^2 ], where L_k
    is the number of edges inside community k and D_k its total degree.
    """
    _check_cover(g, a)
    if g.m == 0:
        raise UndefinedMetricError("modularity is undefined for a graph without edges")
    u, v = g.edge_arrays()
    lu, lv = a.labels[u], a.labels[v]
    same = lu == lv
    internal = np.bincount(lu[same], minlength=a.k).astype(np.float64)
    degsum = np.bincount(a.labels, weights=g.degrees.astype(np.float64), minlength=a.k)
    m = float(g.m)
    return float(internal.sum() / m - np.sum((degsum / (2.0 * m)) ** 2))


def best_level_modularity(h) -> tuple[int, float]:
    """(level, modularity) of the best level against the base graph; earliest level wins ties."""
    from hlp.hierarchy import project_to_base

    if not h.levels:
        raise ValueError("hierarchy has no levels")
    best_t, best_q = 0, -np.inf
    for t in range(1, len(h.levels) + 1):
        q = modularity(h.base, project_to_base(h, t))
        if q > best_q:
            best_t, best_q = t, q
    return best_t, best_q


def community_edge_stats(g: Graph, a: Assignment) -> CommunityEdgeStats:
    _check_cover(g, a)
    u, v = g.edge_arrays()
    lu, lv = a.labels[u], a.labels[v]
    same = lu == lv
    internal = np.bincount(lu[same], minlength=a.k)
    p = np.minimum(lu[~same], lv[~same])
    q = np.maximum(lu[~same], lv[~same])
    external = (np.bincount(p, minlength=a.k) + np.bincount(q, minlength=a.k))
    keys, counts = np.unique(p * np.int64(max(a.k, 1)) + q, return_counts=True)
    pi, qi = np.divmod(keys, np.int64(max(a.k, 1)))
    cuts = {(int(i), int(j)): int(c) for i, j, c in zip(pi, qi, counts)}
    return CommunityEdgeStats(internal=internal, external=external, pair_cuts=cuts)
