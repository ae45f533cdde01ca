"""routewalk: landscape statistics for unicast routing configurations.

The toolkit treats a choice of route for every ordered source-destination
pair as one point in a large configuration space, samples that space with
seeded random walks, scores each point by mean packet delay from an embedded
event-driven simulator, and reports fitness-distance correlation and walk
autocorrelation, the standard indicators of how hard the space is to search.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DegenerateResultError,
    EstimatorError,
    InfeasiblePairError,
    RouteWalkError,
    ScenarioError,
    SimulationError,
    SpaceSizeError,
    TopologyError,
    TrafficError,
)
from .landscape import (
    AutocorrResult,
    LandscapeStats,
    WalkParams,
    WalkTrace,
    analyze,
    autocorrelation,
    classify_autocorr,
    derive_seed,
    fdc,
    random_walk,
    scatter_data,
)
from .netsim import SimParams, SimResult, simulate
from .routespace import (
    RouteTable,
    enumerate_all,
    enumerate_routes,
    hamming_distance,
    neighbor_step,
    random_configuration,
    space_size,
    write_route_table_csv,
)
from .scenario import Scenario, load_scenario
from .topology import (
    Flow,
    Link,
    Topology,
    TrafficPattern,
    adjacent_pattern,
    build_cycle,
    hotspot_pattern,
    load_topology,
    save_topology,
)
