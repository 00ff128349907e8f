"""Survivable optical network design with in-network aggregation and XOR coding."""

from .net_model import (
    Demand,
    DemandSet,
    Link,
    Topology,
    TransceiverTable,
    bundled_topology,
    default_table,
    generate_traffic,
    load_topology,
    slices_for,
)
from .pathing import Path, PathPair, disjoint_pairs, k_shortest_paths
from .provision import (
    MixedRoute,
    ProvisionConfig,
    Solution,
    build_aggregated,
    build_bypass,
    build_encoded,
    check_capacity,
    total_cost,
    verify_survivability,
)
from .solver import DesignInstance, brute_force, enumerate_candidates, solve_exact, solve_greedy

__version__ = "0.1.0"
