"""Gateway placement for LP WAN networks via greedy capacitated k-domination."""

from .bench import ExperimentGrid, RunStats, run_experiment, sf_distribution
from .graph import (
    PlacementSolution,
    ProblemInstance,
    VisibilityGraph,
    coverage_deficit,
    load_solution,
    neighbors,
    save_solution,
)
from .oracle import OracleResult, exact_min_gateways
from .radio import (
    PropagationParams,
    build_visibility_graph,
    link_cost,
    received_power,
    sf_for_link,
)
from .solver import (
    GatewayChoice,
    ValidationReport,
    create_connection_graph,
    new_gateway,
    solve,
    validate_solution,
)
from .topo import Node, Topology, generate_topology, load_topology, save_topology

__version__ = "0.1.0"
