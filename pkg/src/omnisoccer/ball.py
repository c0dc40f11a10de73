"""Ball dynamics, stop prediction, and kicker impulse calibration.

The rolling ball is modeled with a constant deceleration opposing its
velocity (default 0.25 m/s^2, a measured approximation and therefore
configurable). Integration is piecewise closed-form so the stop instant
inside a step is exact. The kicker map is a low-order polynomial from
solenoid impulse duration to initial ball speed, fitted by least squares
and invertible to command target speeds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .geometry import Vec2

DEFAULT_DECEL = 0.25  # m/s^2, magnitude of rolling deceleration
DEFAULT_IMPULSE_CAP = 0.005  # s, solenoid impulse hard cap

CSV_HEADER = ("impulse_s", "speed_mps")


class BallModelError(ValueError):
    """Invalid ball-model input."""


class InsufficientDataError(BallModelError):
    """Not enough samples for the requested estimate."""


class CalibrationInvalidError(BallModelError):
    """Kick map unusable for inversion (non-monotonic on its domain)."""


@dataclass(frozen=True)
class BallState:
    """Ball position and velocity in the field frame."""

    pos: Vec2
    vel: Vec2

    def speed(self) -> float:
        return self.vel.norm()

    def at_rest(self) -> bool:
        return self.vel.x == 0.0 and self.vel.y == 0.0


@dataclass(frozen=True)
class DecelModel:
    """Constant-magnitude deceleration opposing the velocity."""

    decel: float = DEFAULT_DECEL

    def __post_init__(self) -> None:
        if not (self.decel > 0.0) or not math.isfinite(self.decel):
            raise BallModelError("deceleration must be positive and finite")


def step_ball(state: BallState, model: DecelModel, dt: float) -> BallState:
    """Advance the ball by `dt` seconds with exact closed-form integration.

    Speed decreases linearly and is floored at zero exactly at the stop
    instant; the ball never reverses direction.
    """
    if not (dt > 0.0) or not math.isfinite(dt):
        raise BallModelError("dt must be positive and finite")
    v = state.speed()
    if v == 0.0:
        return state
    ux = state.vel.x / v
    uy = state.vel.y / v
    t_stop = v / model.decel
    tau = min(dt, t_stop)
    dist = v * tau - 0.5 * model.decel * tau * tau
    pos = Vec2(state.pos.x + ux * dist, state.pos.y + uy * dist)
    if dt >= t_stop:
        return BallState(pos, Vec2(0.0, 0.0))
    v_new = v - model.decel * tau
    return BallState(pos, Vec2(ux * v_new, uy * v_new))


class StopPrediction(NamedTuple):
    pos: Vec2
    t_stop: float


def predict_stop(state: BallState, model: DecelModel) -> StopPrediction:
    """Closed-form rest point and time-to-stop for a decelerating ball."""
    v = state.speed()
    if v == 0.0:
        return StopPrediction(state.pos, 0.0)
    t_stop = v / model.decel
    dist = v * v / (2.0 * model.decel)
    u = state.vel.normalized()
    return StopPrediction(state.pos + u * dist, t_stop)


@dataclass(frozen=True)
class KickSample:
    """One calibration observation: impulse duration -> measured ball speed."""

    impulse: float  # s
    speed: float  # m/s

    def __post_init__(self) -> None:
        if not (0.0 <= self.impulse) or not math.isfinite(self.impulse):
            raise BallModelError(f"impulse must be >= 0, got {self.impulse!r}")
        if not (self.speed >= 0.0) or not math.isfinite(self.speed):
            raise BallModelError(f"speed must be >= 0, got {self.speed!r}")


@dataclass(frozen=True)
class KickMap:
    """Quadratic map from impulse duration (s) to initial ball speed (m/s).

    Evaluated only on [0, cap]; predicted speeds are clipped at zero.
    """

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    cap: float = DEFAULT_IMPULSE_CAP

    def __post_init__(self) -> None:
        if not (self.cap > 0.0):
            raise BallModelError("impulse cap must be positive")

    def speed(self, impulse: float) -> float:
        if not (0.0 <= impulse <= self.cap):
            raise BallModelError(
                f"impulse {impulse!r} outside calibration domain [0, {self.cap}]"
            )
        return max(0.0, self.c0 + self.c1 * impulse + self.c2 * impulse * impulse)

    def _poly(self, t: float) -> float:
        return self.c0 + self.c1 * t + self.c2 * t * t

    def is_monotonic(self, rel_tol: float = 0.05) -> bool:
        """Non-decreasing on [0, cap], up to calibration-noise-sized dips.

        Noisy least-squares fits of a kicker that is flat near zero
        routinely dip slightly below their starting value. The map counts
        as monotonic when its largest decrease over the domain is within
        `rel_tol` of the map's magnitude; genuinely decreasing maps fail.
        """
        s0 = self._poly(0.0)
        s1 = self._poly(self.cap)
        candidates = [abs(s0), abs(s1)]
        decrease = max(0.0, s0 - s1)
        if self.c2 != 0.0:
            vertex = -self.c1 / (2.0 * self.c2)
            if 0.0 < vertex < self.cap:
                sv = self._poly(vertex)
                candidates.append(abs(sv))
                if self.c2 > 0.0:
                    decrease = max(0.0, s0 - sv)  # dip near the start
                else:
                    decrease = max(0.0, sv - s1)  # falls after the peak
        return decrease <= rel_tol * max(max(candidates), 1e-2)


class KickSolution(NamedTuple):
    impulse: float
    unreachable: bool


class KickFit(NamedTuple):
    map: KickMap
    residual_var: float
    degree: int


def fit_kick_map(
    samples: Sequence[KickSample], cap: float = DEFAULT_IMPULSE_CAP
) -> KickFit:
    """Least-squares polynomial fit of speed over impulse duration.

    A full quadratic needs three distinct impulse values; fewer distinct
    values reduce the degree. Returns the map plus a residual variance
    estimate (unbiased when the system is overdetermined).
    """
    if not samples:
        raise InsufficientDataError("no kick samples")
    t = np.array([s.impulse for s in samples])
    y = np.array([s.speed for s in samples])
    if np.any(t > cap + 1e-12):
        raise BallModelError("sample impulse beyond the cap")
    distinct = len(set(float(v) for v in t))
    degree = min(2, distinct - 1)
    coeffs = np.polynomial.polynomial.polyfit(t, y, degree)
    c = [0.0, 0.0, 0.0]
    for i, v in enumerate(coeffs):
        c[i] = float(v)
    kick_map = KickMap(c[0], c[1], c[2], cap=cap)
    pred = c[0] + c[1] * t + c[2] * t * t
    dof = len(samples) - (degree + 1)
    resid_var = float(np.sum((y - pred) ** 2) / dof) if dof > 0 else 0.0
    return KickFit(kick_map, resid_var, degree)


def invert_kick_map(kick_map: KickMap, target_speed: float) -> KickSolution:
    """Smallest impulse in [0, cap] whose predicted speed reaches the target.

    Returns (cap, unreachable=True) when the target exceeds the map's range.
    """
    if not (target_speed >= 0.0) or not math.isfinite(target_speed):
        raise BallModelError("target speed must be >= 0 and finite")
    if not kick_map.is_monotonic():
        raise CalibrationInvalidError("kick map is not monotonic on [0, cap]")
    if target_speed <= kick_map.speed(0.0):
        return KickSolution(0.0, False)
    if target_speed > kick_map.speed(kick_map.cap):
        return KickSolution(kick_map.cap, True)
    c0, c1, c2 = kick_map.c0, kick_map.c1, kick_map.c2
    # solve c2 t^2 + c1 t + (c0 - target) = 0 for the smallest root in range
    if abs(c2) < 1e-12:
        t = (target_speed - c0) / c1
    else:
        disc = c1 * c1 - 4.0 * c2 * (c0 - target_speed)
        disc = max(disc, 0.0)
        roots = [
            (-c1 + math.sqrt(disc)) / (2.0 * c2),
            (-c1 - math.sqrt(disc)) / (2.0 * c2),
        ]
        valid = [r for r in roots if -1e-12 <= r <= kick_map.cap * (1.0 + 1e-12)]
        if not valid:
            return KickSolution(kick_map.cap, True)
        t = min(valid)
    t = min(max(t, 0.0), kick_map.cap)
    return KickSolution(t, False)


def estimate_velocity(
    samples: Sequence[tuple], window: int = 3
) -> Vec2:
    """Finite-difference velocity over the trailing window of (t, Vec2) samples."""
    if len(samples) < 2:
        raise InsufficientDataError("need at least two timestamped positions")
    times = [float(t) for t, _ in samples]
    for earlier, later in zip(times, times[1:]):
        if not later > earlier:
            raise BallModelError("timestamps must be strictly increasing")
    k = min(window, len(samples))
    t0, p0 = samples[-k]
    t1, p1 = samples[-1]
    dt = float(t1) - float(t0)
    return Vec2((p1.x - p0.x) / dt, (p1.y - p0.y) / dt)


def save_kick_samples(path, samples: Iterable[KickSample]) -> None:
    """Write calibration samples as CSV with header impulse_s,speed_mps."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for s in samples:
            writer.writerow([repr(s.impulse), repr(s.speed)])


def load_kick_samples(path) -> list:
    """Read calibration samples from the CSV schema written by save_kick_samples."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != list(CSV_HEADER):
            raise BallModelError(
                f"expected CSV header {','.join(CSV_HEADER)}, got {header!r}"
            )
        for row in reader:
            if not row:
                continue
            out.append(KickSample(float(row[0]), float(row[1])))
    return out
