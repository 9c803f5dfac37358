"""Grid-world exploration simulator with budget-aware frontier planners."""

from .grid import (
    Cell,
    CellState,
    GroundTruthMap,
    MapFormatError,
    MapGenerationError,
    MapParams,
    ObservedMap,
    coverage,
    format_map,
    generate_map,
    load_map,
    reachable_free_cells,
)
from .sensing import (
    Action,
    AgentState,
    Heading,
    SensorConfig,
    apply_action,
    reveal,
    visible_cells,
)
from .frontiers import Frontier, centroid, extract_frontiers, filter_reachable
from .estimation import (
    DisconnectedGraphError,
    Estimator,
    FrontierEstimate,
    NoisyEstimator,
    OracleEstimator,
    SkeletonGraph,
    make_estimator,
    oracle_area,
    oracle_estimate,
    region_beyond,
    skeletonize,
    tour_costs,
)
from .planner import (
    BeliefAction,
    PlanResult,
    PlannerBelief,
    build_belief,
    known_space_distance,
    make_planner,
    partial_reward,
    q_value,
    select_greedy,
    select_lfe,
    select_nearest,
)
from .navigation import PathNotFoundError, next_primitive, plan_path
from .harness import (
    ConfigError,
    EpisodeConfig,
    EpisodeResult,
    run_benchmark,
    run_episode,
    write_replay,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentState",
    "BeliefAction",
    "Cell",
    "CellState",
    "ConfigError",
    "DisconnectedGraphError",
    "EpisodeConfig",
    "EpisodeResult",
    "Estimator",
    "Frontier",
    "FrontierEstimate",
    "GroundTruthMap",
    "Heading",
    "MapFormatError",
    "MapGenerationError",
    "MapParams",
    "NoisyEstimator",
    "ObservedMap",
    "OracleEstimator",
    "PathNotFoundError",
    "PlanResult",
    "PlannerBelief",
    "SensorConfig",
    "SkeletonGraph",
    "apply_action",
    "build_belief",
    "centroid",
    "coverage",
    "extract_frontiers",
    "filter_reachable",
    "format_map",
    "generate_map",
    "known_space_distance",
    "load_map",
    "make_estimator",
    "make_planner",
    "next_primitive",
    "oracle_area",
    "oracle_estimate",
    "partial_reward",
    "plan_path",
    "q_value",
    "reachable_free_cells",
    "region_beyond",
    "reveal",
    "run_benchmark",
    "run_episode",
    "select_greedy",
    "select_lfe",
    "select_nearest",
    "skeletonize",
    "tour_costs",
    "visible_cells",
    "write_replay",
]
