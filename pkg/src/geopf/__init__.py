"""Geometry-aware reactive potential-field planning.

Obstacles are geometric primitives (spheres, segments, rectangles, boxes,
cylinders) with closed-form closest-feature queries; the planner turns them
into repulsive vector fields, integrates a point robot to its goal, and a
benchmark harness compares it against sphere-cloud potential-field and
circulatory-field baselines on randomized scenes.
"""

from .baselines import SpherizationParams, cf_force, pf_force, spherize
from .bench import (
    PlannerSpec,
    SuiteReport,
    TrialMetrics,
    compute_metrics,
    replay_distances,
    run_suite,
    write_csv,
    write_json,
)
from .errors import (
    CollisionSignal,
    DegenerateVector,
    GenerationFailure,
    SceneSchemaError,
)
from .forces import (
    D_MIN,
    ForceBreakdown,
    Gains,
    attractive_force,
    cylinder_cap_correction,
    plane_force_with_correction,
    repulsive_force,
    resultant_force,
)
from .planners import (
    GeoPFPlanner,
    SphereCFPlanner,
    SpherePFPlanner,
    build_planner,
)
from .primitives import (
    Cube,
    Cylinder,
    Primitive,
    RectPlane,
    Segment,
    Sphere,
    normalize,
    translated,
    unit_from_to,
)
from .queries import (
    ClosestFeature,
    FeatureKind,
    closest_feature,
    cube_closest,
    cylinder_closest,
    distance,
    plane_closest,
    plane_foot,
    plane_inside,
    plane_normal,
    segment_closest,
    sphere_closest,
)
from .scenes import (
    Obstacle,
    Scene,
    SceneClass,
    corridor_boundary,
    generate,
    load_scene,
    maze_scene,
    save_scene,
)
from .sim import (
    SimParams,
    TrajectoryRecord,
    TrajState,
    Verdict,
    VerdictKind,
    integrate_step,
    run_trial,
    trajectory_lines,
    write_trajectory,
)

__version__ = "0.1.0"

__all__ = [
    "CollisionSignal",
    "ClosestFeature",
    "Cube",
    "Cylinder",
    "D_MIN",
    "DegenerateVector",
    "FeatureKind",
    "ForceBreakdown",
    "Gains",
    "GenerationFailure",
    "GeoPFPlanner",
    "Obstacle",
    "PlannerSpec",
    "Primitive",
    "RectPlane",
    "Scene",
    "SceneClass",
    "SceneSchemaError",
    "Segment",
    "SimParams",
    "Sphere",
    "SphereCFPlanner",
    "SpherePFPlanner",
    "SpherizationParams",
    "SuiteReport",
    "TrajState",
    "TrajectoryRecord",
    "TrialMetrics",
    "Verdict",
    "VerdictKind",
    "attractive_force",
    "build_planner",
    "cf_force",
    "closest_feature",
    "compute_metrics",
    "corridor_boundary",
    "cube_closest",
    "cylinder_cap_correction",
    "cylinder_closest",
    "distance",
    "generate",
    "integrate_step",
    "load_scene",
    "maze_scene",
    "normalize",
    "pf_force",
    "plane_closest",
    "plane_foot",
    "plane_inside",
    "plane_force_with_correction",
    "plane_normal",
    "repulsive_force",
    "replay_distances",
    "resultant_force",
    "run_suite",
    "run_trial",
    "save_scene",
    "segment_closest",
    "spherize",
    "sphere_closest",
    "trajectory_lines",
    "translated",
    "unit_from_to",
    "write_csv",
    "write_json",
    "write_trajectory",
]
