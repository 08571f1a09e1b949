"""Hierarchical community detection by repeated label propagation and graph coarsening."""

from hlp.baselines import densest_subgraph_peel, kcore_split
from hlp.graph import (CoreDecomposition, EdgeList, EmptyInputError, Graph, ParseError,
                       build_graph, core_decomposition, parse_edge_list, read_graph)
from hlp.hierarchy import (CompressedHierarchy, Hierarchy, Level, LevelStats, build_hierarchy,
                           compress, create_super_graph, expand, project_to_base)
from hlp.labelprop import (Assignment, LpParams, LpState, compact_labels, propagate,
                           update_node)
from hlp.metrics import (CommunityEdgeStats, UndefinedMetricError, best_level_modularity,
                         community_edge_stats, modularity)

__version__ = "0.1.0"
