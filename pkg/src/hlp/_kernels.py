"""Compiled inner loops.

Everything here works on raw CSR arrays (``offsets``, ``neighbors``) so the
public modules can stay plain numpy/dataclass code.
"""

import numpy as np
from numba import njit


# nodes per block in lp_sweep; the next block's first neighbor is touched early
PREFETCH_BLOCK = 32


@njit(cache=True)
def lp_sweep(offsets, neighbors, labels, stable, order, draws, counts, touched, maxbuf):
    """One asynchronous label propagation pass over ``order``.

    ``counts`` must be all-zero on entry and is left all-zero on exit.
    ``draws[i]`` in [0, 1) resolves a random tie for the i-th update.
    Candidate labels are considered in order of first appearance among the
    neighbors. Returns (labels changed, counter operations, prefetch checksum).

    Before each block is processed, the following block's adjacency starts
    are read so their cache misses overlap instead of serializing; the
    checksum only exists to keep those reads from being optimized away.
    """
    changed = 0
    work = 0
    sink = 0
    nord = order.shape[0]
    for b0 in range(0, nord, PREFETCH_BLOCK):
        b1 = min(b0 + PREFETCH_BLOCK, nord)
        for j in range(b1, min(b1 + PREFETCH_BLOCK, nord)):
            w = order[j]
            lo = offsets[w]
            if lo < offsets[w + 1]:
                sink += labels[neighbors[lo]]
        for i in range(b0, b1):
            v = order[i]
            lo = offsets[v]
            hi = offsets[v + 1]
            work += 1
            if lo == hi:
                stable[v] += 1
                continue
            nt = 0
            best = 0
            for p in range(lo, hi):
                lab = labels[neighbors[p]]
                if counts[lab] == 0:
                    touched[nt] = lab
                    nt += 1
                counts[lab] += 1
                work += 1
                if counts[lab] > best:
                    best = counts[lab]
            cur = labels[v]
            if counts[cur] == best:
                new = cur
            else:
                nmax = 0
                for q in range(nt):
                    if counts[touched[q]] == best:
                        maxbuf[nmax] = touched[q]
                        nmax += 1
                pick = int(draws[i] * nmax)
                if pick >= nmax:
                    pick = nmax - 1
                new = maxbuf[pick]
            for q in range(nt):
                counts[touched[q]] = 0
            if new != cur:
                labels[v] = new
                stable[v] = 0
                changed += 1
            else:
                stable[v] += 1
    return changed, work, sink


@njit(cache=True)
def min_degree_peel(offsets, neighbors):
    """Exact minimum-degree peeling with bucket lists.

    Returns (order, removal_degree): nodes in removal sequence and the number
    of not-yet-removed neighbors each had when it was taken. Buckets start
    in increasing id order and demoted nodes go to the front, so ties are
    deterministic.
    """
    n = offsets.shape[0] - 1
    order = np.empty(n, dtype=np.int64)
    rdeg = np.empty(n, dtype=np.int64)
    if n == 0:
        return order, rdeg
    deg = np.empty(n, dtype=np.int64)
    maxd = 0
    for v in range(n):
        deg[v] = offsets[v + 1] - offsets[v]
        if deg[v] > maxd:
            maxd = deg[v]
    head = np.full(maxd + 1, -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    prv = np.full(n, -1, dtype=np.int64)
    for v in range(n - 1, -1, -1):
        d = deg[v]
        nxt[v] = head[d]
        if head[d] != -1:
            prv[head[d]] = v
        head[d] = v
    removed = np.zeros(n, dtype=np.bool_)
    d = 0
    for i in range(n):
        while head[d] == -1:
            d += 1
        v = head[d]
        head[d] = nxt[v]
        if nxt[v] != -1:
            prv[nxt[v]] = -1
        order[i] = v
        rdeg[i] = deg[v]
        removed[v] = True
        for p in range(offsets[v], offsets[v + 1]):
            w = neighbors[p]
            if removed[w]:
                continue
            dw = deg[w]
            # unlink w from bucket dw
            if prv[w] != -1:
                nxt[prv[w]] = nxt[w]
            else:
                head[dw] = nxt[w]
            if nxt[w] != -1:
                prv[nxt[w]] = prv[w]
            dw -= 1
            deg[w] = dw
            prv[w] = -1
            nxt[w] = head[dw]
            if head[dw] != -1:
                prv[head[dw]] = w
            head[dw] = w
        if d > 0:
            d -= 1
    return order, rdeg


@njit(cache=True)
def stale_nodes(offsets, neighbors, labels, candidates, counts):
    """Candidates whose label no longer attains their neighborhood maximum.

    ``counts`` must be all-zero on entry and is left all-zero on exit.
    """
    out = np.empty(candidates.shape[0], dtype=np.int64)
    nout = 0
    for i in range(candidates.shape[0]):
        v = candidates[i]
        lo = offsets[v]
        hi = offsets[v + 1]
        if lo == hi:
            continue
        best = 0
        for p in range(lo, hi):
            lab = labels[neighbors[p]]
            counts[lab] += 1
            if counts[lab] > best:
                best = counts[lab]
        if counts[labels[v]] < best:
            out[nout] = v
            nout += 1
        for p in range(lo, hi):
            counts[labels[neighbors[p]]] = 0
    return out[:nout]


@njit(cache=True)
def coarsen(offsets, neighbors, labels, k):
    """CSR of the community graph: q in adj(p) iff some edge joins communities p != q.

    Members are bucketed by community, then each community's crossing
    targets are collected once using a last-seen marker per target. The
    result is symmetric, so one transpose pass yields sorted lists.
    """
    n = offsets.shape[0] - 1
    start = np.zeros(k + 1, dtype=np.int64)
    for v in range(n):
        start[labels[v] + 1] += 1
    for c in range(k):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    members = np.empty(n, dtype=np.int64)
    for v in range(n):
        c = labels[v]
        members[fill[c]] = v
        fill[c] += 1

    marker = np.full(k, -1, dtype=np.int64)
    out_offsets = np.zeros(k + 1, dtype=np.int64)
    buf = np.empty(neighbors.shape[0], dtype=neighbors.dtype)
    cnt = 0
    for p in range(k):
        for idx in range(start[p], start[p + 1]):
            v = members[idx]
            for e in range(offsets[v], offsets[v + 1]):
                q = labels[neighbors[e]]
                if q != p and marker[q] != p:
                    marker[q] = p
                    buf[cnt] = q
                    cnt += 1
        out_offsets[p + 1] = cnt

    out = np.empty(cnt, dtype=neighbors.dtype)
    fill = out_offsets[:-1].copy()
    for p in range(k):
        for e in range(out_offsets[p], out_offsets[p + 1]):
            q = buf[e]
            out[fill[q]] = p
            fill[q] += 1
    return out_offsets, out


@njit(cache=True)
def first_occurrence_ranks(raw, bound):
    """Relabel ``raw`` (values in [0, bound)) by order of first appearance; returns (labels, k)."""
    rank = np.full(bound, -1, dtype=np.int64)
    out = np.empty(raw.shape[0], dtype=np.int64)
    k = 0
    for i in range(raw.shape[0]):
        r = raw[i]
        if rank[r] < 0:
            rank[r] = k
            k += 1
        out[i] = rank[r]
    return out, k
