"""Distribute GHZ and arbitrary graph states over quantum networks.

Graph states are tracked as simple graphs plus a frame of pending
single-qubit Cliffords; a small stabilizer simulator certifies every
rewrite and every compiled schedule exactly.
"""

from graphdist.clifford import CLIFFORDS, Clifford1
from graphdist.graph_core import (
    LocalCliffordFrame,
    SimpleGraph,
    delete_vertex,
    local_complement,
    measurement_byproduct,
    toggle_edge,
    y_measure_rewrite,
    z_measure_rewrite,
)
from graphdist.network import (
    CZ,
    Correct,
    GenerateBell,
    LocalComplement,
    Measure,
    MeasureY,
    MeasureZ,
    Network,
    Node,
    Prepare,
    Schedule,
    begin_step,
    execute,
    load_network,
    verify_schedule,
)
from graphdist.protocols import (
    CostReport,
    GhzRequest,
    GraphRequest,
    distribute_edge_decorated,
    distribute_ghz,
    distribute_graph,
    project_target,
    star_cover,
    star_expansion,
)
from graphdist.stabilizer import (
    StabilizerTableau,
    find_correction,
    measure_pauli,
    tableau_from_graph,
    verify_rewrite,
)
from graphdist.steiner import SteinerInstance, SteinerTree, remove_terminal, steiner_approx, steiner_exact

__version__ = "0.1.0"

__all__ = [
    "CLIFFORDS",
    "Clifford1",
    "LocalCliffordFrame",
    "SimpleGraph",
    "delete_vertex",
    "local_complement",
    "measurement_byproduct",
    "toggle_edge",
    "y_measure_rewrite",
    "z_measure_rewrite",
    "CZ",
    "Correct",
    "GenerateBell",
    "LocalComplement",
    "Measure",
    "MeasureY",
    "MeasureZ",
    "Network",
    "Node",
    "Prepare",
    "Schedule",
    "begin_step",
    "execute",
    "load_network",
    "verify_schedule",
    "CostReport",
    "GhzRequest",
    "GraphRequest",
    "distribute_edge_decorated",
    "distribute_ghz",
    "distribute_graph",
    "project_target",
    "star_cover",
    "star_expansion",
    "StabilizerTableau",
    "find_correction",
    "measure_pauli",
    "tableau_from_graph",
    "verify_rewrite",
    "SteinerInstance",
    "SteinerTree",
    "remove_terminal",
    "steiner_approx",
    "steiner_exact",
]
