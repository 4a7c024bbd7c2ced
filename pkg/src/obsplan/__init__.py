"""Shortest observation tours for directed objects under a gross quality constraint."""

from obsplan.geometry import (
    Object,
    Point2,
    QualityBounds,
    SensingSpec,
    angle_between,
    can_observe,
    quality,
    quality_bounds,
)
from obsplan.discretize import (
    GridSpec,
    ObservationPoint,
    build_grid,
    canonical_points,
    generate_observation_points,
    pairwise_diameter,
)
from obsplan.harness import gen_instance, run_case, summarize
from obsplan.instance import Instance, PreparedInstance, prepare
from obsplan.pareto import (
    INFEASIBLE,
    InfeasibleAssumption,
    ParetoSet,
    PathLabel,
    PlanResult,
    dominates,
    dp_solve,
    insert_pruned,
    run_quality,
)

__all__ = [
    "INFEASIBLE",
    "GridSpec",
    "InfeasibleAssumption",
    "Instance",
    "Object",
    "ObservationPoint",
    "ParetoSet",
    "PathLabel",
    "PlanResult",
    "Point2",
    "PreparedInstance",
    "QualityBounds",
    "SensingSpec",
    "angle_between",
    "build_grid",
    "can_observe",
    "canonical_points",
    "dominates",
    "dp_solve",
    "gen_instance",
    "generate_observation_points",
    "insert_pruned",
    "pairwise_diameter",
    "prepare",
    "quality",
    "quality_bounds",
    "run_case",
    "run_quality",
    "summarize",
]
