"""Hierarchy serialization: one JSON document per run, one DOT file per level."""

from __future__ import annotations

import io
import json
from pathlib import Path
from typing import Optional

import numpy as np

from hlp.hierarchy import (CompressedHierarchy, Hierarchy, _compose, compress, expand,
                           project_to_base)
from hlp.labelprop import Assignment
from hlp.metrics import UndefinedMetricError, community_edge_stats, modularity

DOCUMENT_FORMAT = "hlp-hierarchy"
DOCUMENT_VERSION = 1


def hierarchy_document(h: Hierarchy, name: Optional[str] = None) -> dict:
    """Plain-dict form of ``h`` with a fixed key order."""
    params = h.params
    levels = []
    for t, level in enumerate(h.levels, start=1):
        try:
            q = modularity(h.base, project_to_base(h, t))
        except UndefinedMetricError:
            q = None
        s = level.stats
        levels.append({
            "level": t,
            "nodes": s.nodes,
            "edges": s.edges,
            "communities": s.communities,
            "supernodes": level.supergraph.n,
            "superedges": level.supergraph.m,
            "iterations": s.iterations,
            "elapsed": s.elapsed,
            "modularity": q,
        })
    c = compress(h)
    return {
        "format": DOCUMENT_FORMAT,
        "version": DOCUMENT_VERSION,
        "meta": {
            "graph": name,
            "n": h.base.n,
            "m": h.base.m,
            "params": None if params is None else {
                "max_iters": params.max_iters,
                "delta": params.delta,
                "seed": params.seed,
            },
        },
        "levels": levels,
        "assignments": {
            "first": [] if c.first is None else c.first.tolist(),
            "merges": [m.tolist() for m in c.merges],
        },
    }


def _write(sink, text: str) -> int:
    data = text.encode("utf-8")
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as fh:
            fh.write(data)
    elif isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(data)
    return len(data)


def write_hierarchy_json(h: Hierarchy, sink, name: Optional[str] = None) -> int:
    """Write the hierarchy document to a path or stream; returns bytes written."""
    if not h.levels:
        raise ValueError("hierarchy has no levels")
    text = json.dumps(hierarchy_document(h, name), indent=1) + "\n"
    return _write(sink, text)


def read_hierarchy_json(source) -> dict:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = json.load(source)
    if doc.get("format") != DOCUMENT_FORMAT:
        raise ValueError(f"not a {DOCUMENT_FORMAT} document")
    return doc


def document_projections(doc: dict) -> list[Assignment]:
    """Base-node assignment per level, rebuilt from a document's compressed form."""
    a = doc["assignments"]
    if not a["first"]:
        return []
    c = CompressedHierarchy(first=np.asarray(a["first"], dtype=np.int64),
                            merges=tuple(np.asarray(m, dtype=np.int64) for m in a["merges"]))
    return expand(c)


def write_supergraph_dot(h: Hierarchy, t: int, sink) -> int:
    """Level-``t`` community graph in DOT.

    Node attributes are the community size in base nodes and the supergraph
    degree; edge ``weight`` is the number of base edges between the two
    communities.
    """
    if not 1 <= t <= len(h.levels):
        raise IndexError(f"level {t} out of range 1..{len(h.levels)}")
    sup = h.levels[t - 1].supergraph
    # composed labels are exactly the supergraph's node ids
    a = Assignment(labels=np.array(_compose(h, t)), k=sup.n)
    cuts = community_edge_stats(h.base, a).pair_cuts
    sizes = a.sizes()
    degrees = sup.degrees
    lines = [f"graph level{t} {{"]
    for c in range(sup.n):
        lines.append(f"  {c} [size={int(sizes[c])}, degree={int(degrees[c])}];")
    for p, q in sup.edges():
        lines.append(f"  {p} -- {q} [weight={cuts[(p, q)]}];")
    lines.append("}")
    return _write(sink, "\n".join(lines) + "\n")
