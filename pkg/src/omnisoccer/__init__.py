"""omnisoccer: a tabletop robot-soccer game controller and simulator.

Library surface: planar geometry, omniwheel kinematics, ball dynamics and
kicker calibration, homography-based vision calibration, a deterministic
match simulator with rule engine, a WebSocket game-controller service,
replay logs, and reference strategies.
"""

from .ball import (
    BallState,
    DecelModel,
    KickMap,
    KickSample,
    estimate_velocity,
    fit_kick_map,
    invert_kick_map,
    predict_stop,
    step_ball,
)
from .config import RunConfig, load_config
from .controller import GameController
from .demo import run_match
from .geometry import (
    Pose2D,
    Segment,
    Vec2,
    angle_error,
    bearing,
    field_to_robot,
    robot_to_field,
    segment_intersection,
    wrap_angle,
)
from .kinematics import (
    Twist,
    WheelLayout,
    clamp_twist,
    forward_kinematics,
    inverse_kinematics,
)
from .replay import read_replay, verify_replay
from .rules import RuleEngine, RuleParams, check_goal
from .server import GameServer, ServiceRunner
from .vision import (
    CalibrationReport,
    Correspondence,
    Homography,
    ImageGeometry,
    check_field_visible,
    field_to_pixel,
    fit_homography,
    pixel_to_field,
    verify_calibration,
)
from .world import DetectionFrame, FieldGeometry, SimParams, World

__version__ = "0.1.0"

__all__ = [
    "BallState", "DecelModel", "KickMap", "KickSample", "estimate_velocity",
    "fit_kick_map", "invert_kick_map", "predict_stop", "step_ball",
    "RunConfig", "load_config", "GameController", "run_match",
    "Pose2D", "Segment", "Vec2", "angle_error", "bearing", "field_to_robot",
    "robot_to_field", "segment_intersection", "wrap_angle",
    "Twist", "WheelLayout", "clamp_twist", "forward_kinematics", "inverse_kinematics",
    "read_replay", "verify_replay", "RuleEngine", "RuleParams", "check_goal",
    "GameServer", "ServiceRunner",
    "CalibrationReport", "Correspondence", "Homography", "ImageGeometry",
    "check_field_visible", "field_to_pixel", "fit_homography", "pixel_to_field",
    "verify_calibration",
    "DetectionFrame", "FieldGeometry", "SimParams", "World",
]
