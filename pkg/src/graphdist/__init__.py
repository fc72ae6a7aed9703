"""Parametrized node distances on weighted graphs.

Families range from shortest path to commute time: randomized shortest paths
(RSP), free energy (FE), logarithmic forest, p-resistance and the SP/resistance
mix, all as dense all-pairs matrices. Brute-force path-sum oracles certify the
closed forms on small graphs.
"""
from .alt import FlowAssignment, log_forest, p_resistance, p_resistance_pair
from .classic import (
    DistanceMatrix,
    commute_cost,
    commute_time,
    resistance,
    shortest_path,
    shortest_path_unweighted,
    spct_combination,
)
from .errors import GraphDistError, NumericalError, ValidationError
from .graph import (
    CostedGraph,
    LaplacianPair,
    laplacian_pair,
    load_graph,
    parse_graph,
    save_graph,
    transition_matrix,
)
from .methods import compute
from .rsp import (
    RspCore,
    build_core,
    directed_expected_costs,
    directed_free_energy,
    free_energy,
    free_energy_distance,
    relative_entropy_matrix,
    rsp,
    rsp_dissimilarity,
)

__version__ = "0.1.0"
