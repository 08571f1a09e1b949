"""Flat label propagation with per-node freeze counters.

Each node starts in its own community. Every iteration visits the still
active nodes in a fresh random order and moves each one to the label held
by the most neighbors, seeing updates made earlier in the same pass. A node
whose label survives ``delta`` consecutive updates is frozen: it stops being
visited but keeps voting for its neighbors.

A pass that changes nothing only ends the run once every frozen node still
holds a majority label; frozen nodes that went stale are woken up and the
run continues.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from hlp._kernels import first_occurrence_ranks, lp_sweep, stale_nodes
from hlp.graph import Graph


@dataclass(frozen=True)
class LpParams:
    max_iters: int = 100
    delta: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.delta < 1:
            raise ValueError(f"delta must be >= 1, got {self.delta}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a non-negative 64-bit integer, got {self.seed}")


@dataclass(frozen=True, eq=False)
class Assignment:
    """Community label per node, compact in 0..k-1."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        self.labels.setflags(write=False)

    def __len__(self):
        return self.labels.size

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    def communities(self) -> list[np.ndarray]:
        """Member node ids for each community, in label order."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(np.bincount(self.labels, minlength=self.k))[:-1]
        return np.split(order, bounds)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


@dataclass
class LpState:
    labels: np.ndarray
    stable_iters: np.ndarray
    delta: int

    @classmethod
    def initial(cls, n: int, delta: int) -> "LpState":
        dtype = np.int32 if n < 2**31 else np.int64
        return cls(labels=np.arange(n, dtype=dtype),
                   stable_iters=np.zeros(n, dtype=np.int32), delta=delta)

    @property
    def active(self) -> np.ndarray:
        return self.stable_iters < self.delta


class LpRun(NamedTuple):
    assignment: Assignment
    iterations: int
    # True when the last pass changed nothing; False on freeze-out or max_iters
    converged: bool
    reason: str
    work: list


def compact_labels(raw: Sequence[int]) -> Assignment:
    """Renumber labels 0..k-1 in order of first appearance by node id.

    >>> compact_labels([7, 7, 2]).labels.tolist()
    [0, 0, 1]
    """
    raw = np.asarray(raw, dtype=np.int64).ravel()
    if raw.size == 0:
        return Assignment(labels=np.zeros(0, dtype=np.int64), k=0)
    lo, hi = int(raw.min()), int(raw.max())
    if lo >= 0 and hi < 4 * raw.size + 1024:
        labels, k = first_occurrence_ranks(raw, hi + 1)
        return Assignment(labels=labels, k=int(k))
    _, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return Assignment(labels=rank[inverse.ravel()], k=int(first.size))


def _vote(neighbor_labels, current: int, draw: float) -> int:
    """Most frequent neighbor label; keep ``current`` if it ties, else pick by ``draw``."""
    if len(neighbor_labels) == 0:
        return current
    counts: dict[int, int] = {}
    for lab in neighbor_labels:
        counts[lab] = counts.get(lab, 0) + 1
    best = max(counts.values())
    if counts.get(current, 0) == best:
        return current
    tied = [lab for lab, c in counts.items() if c == best]
    return tied[min(int(draw * len(tied)), len(tied) - 1)]


def update_node(g: Graph, state: LpState, v: int, rng: np.random.Generator) -> int:
    """New label for ``v`` under the neighbor-majority rule.

    ``v``'s own label casts no vote. Ties keep the current label when it is
    among the maxima, otherwise one of the maximal labels is drawn with
    ``rng``. Nodes without neighbors keep their label. ``state`` is not
    modified.
    """
    nbr_labels = state.labels[g.neighbors_of(v)].tolist()
    current = int(state.labels[v])
    return _vote(nbr_labels, current, rng.random() if nbr_labels else 0.0)


def _python_sweep(g: Graph, labels, stable, order, draws):
    changed = work = 0
    for i, v in enumerate(order.tolist()):
        nbrs = g.neighbors_of(v)
        work += 1 + nbrs.size
        cur = int(labels[v])
        new = _vote(labels[nbrs].tolist(), cur, draws[i])
        if new != cur:
            labels[v] = new
            stable[v] = 0
            changed += 1
        else:
            stable[v] += 1
    return changed, work


def level_rng(seed: int, t: int) -> np.random.Generator:
    """Independent random stream for hierarchy level ``t`` of a run seeded with ``seed``.

    Flat propagation uses the level-1 stream, so it coincides with the
    first level of a hierarchy built from the same seed.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, t]))


def run_propagation(g: Graph, params: LpParams = LpParams(), rng=None,
                    engine: str = "compiled") -> LpRun:
    """Label propagation with full run diagnostics.

    ``rng`` defaults to ``level_rng(params.seed, 1)``. ``engine``
    selects the compiled sweep or the pure-Python reference; both consume
    the random stream identically and produce identical results.
    """
    if engine not in ("compiled", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    if rng is None:
        rng = level_rng(params.seed, 1)
    state = LpState.initial(g.n, params.delta)
    labels, stable = state.labels, state.stable_iters
    counts = np.zeros(max(g.n, 1), dtype=np.int32)
    if engine == "compiled":
        maxdeg = int(g.degrees.max()) if g.n else 0
        touched = np.empty(max(maxdeg, 1), dtype=labels.dtype)
        maxbuf = np.empty_like(touched)

    work = []
    iterations = 0
    reason = "max_iters"
    while iterations < params.max_iters:
        active = np.flatnonzero(stable < params.delta)
        if active.size == 0:
            reason = "frozen"
            break
        order = rng.permutation(active)
        draws = rng.random(order.size)
        iterations += 1
        if engine == "compiled":
            changed, ops, _ = lp_sweep(g.offsets, g.neighbors, labels, stable, order,
                                       draws, counts, touched, maxbuf)
        else:
            changed, ops = _python_sweep(g, labels, stable, order, draws)
        work.append(int(ops))
        if changed == 0:
            frozen = np.flatnonzero(stable >= params.delta)
            stale = stale_nodes(g.offsets, g.neighbors, labels, frozen, counts)
            if stale.size == 0:
                reason = "converged"
                break
            stable[stale] = 0
    return LpRun(assignment=compact_labels(labels), iterations=iterations,
                 converged=reason == "converged", reason=reason, work=work)


def propagate(g: Graph, params: LpParams = LpParams()) -> tuple[Assignment, int]:
    """Run label propagation; returns (assignment, iterations used)."""
    run = run_propagation(g, params)
    return run.assignment, run.iterations
