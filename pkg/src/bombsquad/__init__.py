"""Two-robot bomb delivery: simulator, strategies and competitive analysis."""

from .core import (
    AXIS,
    ORIGIN,
    Axis,
    Boundary,
    BombSquadError,
    BranchError,
    ConfigurationError,
    DeliveryOutcome,
    Event,
    EventKind,
    Instance,
    InvalidInstanceError,
    KnowledgeConfig,
    MalformedTrajectoryError,
    ModelViolationError,
    NonterminationError,
    OutOfRangeError,
    Point2,
    RobotSpec,
    SimulationTimeoutError,
    SpeedViolation,
    Trajectory,
    UncoveredCaseError,
    load_instance,
    normalize_instance,
    trajectory_position,
    validate_trajectory,
)
from .engine import SimConfig, collocation_time, simulate
from .offline import OfflineMode, OfflinePlan, offline_bruteforce_oracle, offline_optimal_plan, offline_optimal_time
from .strategies import A_STAR, ALGORITHMS, ZigzagStrategy, closed_form_time, make_strategies, run
from .analysis import (
    SearchDomain,
    SearchResult,
    adversarial_search,
    competitive_ratio,
    discoverable_lower_family,
    invisible_lower_bound,
    oneaxis_lower_curve,
    optimize_expansion_factor,
    visible_lower_family,
    zigzag_cr,
)

__version__ = "0.1.0"
