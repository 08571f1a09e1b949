"""Linear-time comparison partitions: max k-core split and repeated densest-subgraph peeling."""

from __future__ import annotations

import numpy as np

from hlp.graph import Graph, core_decomposition, induced_subgraph
from hlp.labelprop import Assignment


class DegenerateInputError(ValueError):
    pass


def kcore_split(g: Graph) -> Assignment:
    """Community 0 is the maximum k-core, community 1 everything else (if anything)."""
    if g.m == 0:
        raise DegenerateInputError("graph has no edges, so no core structure")
    core = core_decomposition(g).core_number
    labels = np.where(core == core.max(), 0, 1).astype(np.int64)
    return Assignment(labels=labels, k=int(labels.max()) + 1)


def densest_suffix(g: Graph) -> tuple[np.ndarray, float]:
    """Densest tail of the min-degree peel order (Charikar's greedy 1/2-approximation).

    Returns (nodes, |E(S)|/|S|). Among equally dense tails the longest wins.
    """
    cd = core_decomposition(g)
    if g.n == 0:
        return np.zeros(0, dtype=np.int64), 0.0
    removed = np.concatenate(([0], np.cumsum(cd.removal_degree)[:-1]))
    density = (g.m - removed) / (g.n - np.arange(g.n, dtype=np.float64))
    start = int(np.argmax(density))
    return cd.peel_order[start:], float(density[start])


def densest_subgraph_peel(g: Graph) -> Assignment:
    """Partition by repeatedly extracting the approximate densest subgraph.

    Each round peels the remaining graph, removes the densest peel tail as
    the next community, and recurses on what is left. Nodes that end up
    with no remaining edges form a single final community.
    """
    labels = np.full(g.n, -1, dtype=np.int64)
    remaining = np.arange(g.n, dtype=np.int64)
    cid = 0
    while remaining.size:
        sub, ids = induced_subgraph(g, remaining)
        if sub.m == 0:
            labels[ids] = cid
            cid += 1
            break
        tail, _ = densest_suffix(sub)
        labels[ids[tail]] = cid
        cid += 1
        remaining = remaining[labels[remaining] < 0]
    return Assignment(labels=labels, k=cid)
