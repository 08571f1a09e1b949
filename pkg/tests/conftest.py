import os
from pathlib import Path

import numpy as np
import pytest

from hlp.graph import Graph
from hlp.hierarchy import Hierarchy, Level, LevelStats, create_super_graph
from hlp.labelprop import Assignment

DATA = Path(__file__).parent / "data"
REPO = Path(__file__).resolve().parents[1]

TWO_TRIANGLES = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]
K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
TRIANGLE = [(0, 1), (1, 2), (0, 2)]

# reachable final LP partitions over every visiting order and tie draw, from
# oracles.lp_outcomes with delta=3; frozen here and recomputed in test_labelprop
K3_OUTCOMES = {((0, 1, 2),)}
TWO_TRIANGLE_OUTCOMES = {((0, 1, 2), (3, 4, 5)), ((0, 1, 2, 3, 4, 5),)}


def partition(a):
    """Assignment as a canonical tuple of sorted member tuples."""
    return tuple(sorted(tuple(c.tolist()) for c in a.communities()))


def random_edges(rng, n, density):
    """Sorted G(n, p)-style edge list of unique pairs with u < v."""
    m = rng.binomial(n * (n - 1) // 2, density) if n > 1 else 0
    u = rng.integers(0, n, m)
    v = rng.integers(0, n, m)
    keep = u != v
    pairs = sorted({(int(min(a, b)), int(max(a, b))) for a, b in zip(u[keep], v[keep])})
    return pairs


def random_graph(seed, n_max=200, n_min=1):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    density = float(rng.choice([0.005, 0.02, 0.05, 0.1, 0.3]))
    edges = random_edges(rng, n, density)
    return Graph.from_edges(edges, n=n), edges


def assign(labels):
    """Assignment from labels that are already compact."""
    labels = np.asarray(labels, dtype=np.int64)
    return Assignment(labels=labels, k=int(labels.max()) + 1 if labels.size else 0)


def manual_hierarchy(base, *label_lists):
    """Hierarchy with hand-chosen assignments, one per level."""
    h = Hierarchy(base=base)
    current = base
    for labels in label_lists:
        a = assign(labels)
        sup = create_super_graph(current, a)
        stats = LevelStats(nodes=current.n, edges=current.m, communities=a.k,
                           iterations=0, elapsed=0.0)
        h.levels.append(Level(assignment=a, supergraph=sup, stats=stats))
        current = sup
    return h


def dataset_path(*names):
    """First existing file among ``names`` in $HLP_DATA_DIR or <repo>/data, else None."""
    dirs = [Path(os.environ["HLP_DATA_DIR"])] if os.environ.get("HLP_DATA_DIR") else []
    dirs.append(REPO / "data")
    for d in dirs:
        for name in names:
            if (d / name).is_file():
                return d / name
    return None


@pytest.fixture
def two_triangles():
    return Graph.from_edges(TWO_TRIANGLES)


# acceptance criterion bookkeeping: number -> (title, [outcomes])
_CRITERIA = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, (title, []))
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        entry[1].append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[number]
        status = "PASS" if outcomes and all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}")
