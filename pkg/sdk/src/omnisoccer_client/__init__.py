"""Student-facing client for the omnisoccer game controller."""

from .client import (
    ClientError,
    ClientHandle,
    FrameView,
    RobotView,
    connect,
)
from .framelog import (
    FrameLog,
    fit_quadratic,
    log_frames,
    plot_ball_speed,
    plot_kick_fit,
    save_kick_samples,
)

__version__ = "0.1.0"

__all__ = [
    "ClientError", "ClientHandle", "FrameView", "RobotView", "connect",
    "FrameLog", "fit_quadratic", "log_frames", "plot_ball_speed",
    "plot_kick_fit", "save_kick_samples",
]
