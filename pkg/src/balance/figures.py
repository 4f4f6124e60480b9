"""Named example graphs used by the CLI fixture writer and the tests."""

from __future__ import annotations

from typing import Dict, Union

from .graph import Graph, WeightedGraph, cycle_graph
from .ring import RingSpec

FIG1_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (3, 5), (3, 6)]
FIG2_EDGES = [(1, 2), (2, 3), (3, 4), (1, 5), (4, 5), (4, 6), (4, 8), (6, 7), (7, 8)]
FIG3_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (2, 5), (5, 4)]
# triangle 1-2-3 with a pendant at 1; also the graph of dependent_commutator_group
FIG4_EDGES = [(1, 2), (2, 3), (1, 3), (1, 4)]
FIG5_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (4, 5), (5, 6), (6, 7), (7, 8), (8, 5)]
FIG6_EDGES = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 1), (1, 9), (3, 10), (5, 11),
              (7, 12), (2, 13), (13, 14), (13, 15), (15, 16), (16, 6), (16, 17)]
# not nets: the fig3 net plus a pendant, and C4 with a second path from v3 back to v3
NET_COND13_EDGES = FIG3_EDGES + [(5, 6)]
NET_COND12_EDGES = [(1, 2), (2, 3), (3, 4), (4, 1), (3, 5), (3, 6), (5, 7), (6, 7)]
GAMMA4_EDGES = [(1, 2), (2, 3), (3, 4), (1, 3)]

# low-degree edge 2-3 and the attachment 1-4 carry units; the high cycle edges are 0
FIG4_UNFAVORABLE_WEIGHTS = {(1, 2): 0, (2, 3): 1, (1, 3): 0, (1, 4): 1}


def fixtures() -> Dict[str, Union[Graph, WeightedGraph]]:
    z3 = RingSpec(3)
    return {
        "fig1.graph": Graph.from_edges(FIG1_EDGES),
        "fig2.graph": Graph.from_edges(FIG2_EDGES),
        "fig3.graph": Graph.from_edges(FIG3_EDGES),
        "fig4.graph": Graph.from_edges(FIG4_EDGES),
        "fig4_unfavorable.wgraph": WeightedGraph.build(z3, FIG4_UNFAVORABLE_WEIGHTS, 4),
        "fig5.graph": Graph.from_edges(FIG5_EDGES),
        "fig6.graph": Graph.from_edges(FIG6_EDGES),
        "net_cond13.graph": Graph.from_edges(NET_COND13_EDGES),
        "net_cond12.graph": Graph.from_edges(NET_COND12_EDGES),
        "gamma4.graph": Graph.from_edges(GAMMA4_EDGES),
        "c4.graph": cycle_graph(4),
    }
