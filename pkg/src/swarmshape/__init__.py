"""Deterministic 2D simulator for self-transformable swarm robots.

Pipeline: shapes compile to per-robot targets, an exact assignment maps
robots to targets, reciprocal-velocity-obstacle navigation drives them
collision-free, and reel-based linear actuators render the shape once
each robot has arrived and oriented.
"""

from .actuator import (
    ActuatorNoise,
    ActuatorUnit,
    Arc,
    Capsule,
    Disc,
    MalformedArcError,
    Mount,
    command_length,
    curved_geometry,
    footprint,
    step_actuator,
    trigger_limit_switch,
)
from .assignment import (
    Assignment,
    CostMatrix,
    InfeasibleAssignmentError,
    build_cost_matrix,
    solve_assignment,
)
from .engine import (
    Metrics,
    RobotState,
    ScenarioError,
    SimObject,
    SimParams,
    Simulation,
    run_scenario,
)
from .geometry import (
    InfeasiblePartitionError,
    Polyline,
    Pose,
    Segment,
    fit_contours,
    partition_stations,
    partition_to_segments,
    wrap_angle,
)
from .interaction import InputClassifier, InputEvent, InputKind, refit_on_drag, refit_sine
from .motion import (
    BehaviorPhase,
    NeighborDisc,
    PidState,
    WheelCommand,
    behavior_step,
    preferred_velocity,
    resolve_velocity,
    rotate_in_place,
    step_kinematics,
    track_velocity,
)
from .shapes import (
    AnimationPlan,
    DataMap,
    DrawnLines,
    Fence,
    FidelityWarning,
    NotReadyError,
    Rectangle,
    ShapeSpec,
    SineWave,
    SvgContour,
    TargetEntry,
    TargetMode,
    TargetSet,
    compile_line_mode,
    compile_point_mode,
    compile_shape,
    coverage_error,
    data_to_heights,
    sequence_keyframes,
)
from .svg import SvgParseError, UnsupportedSvgFeatureError, parse_svg

__version__ = "0.1.0"
