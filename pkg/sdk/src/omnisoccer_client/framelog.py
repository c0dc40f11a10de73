"""Data logging and plotting helpers.

Capture a stretch of detection frames, export them as CSV, estimate ball
speed by finite differences, and produce the two classic calibration
figures: speed-vs-time after a kick (linear decay) and speed-vs-impulse
with a quadratic fit overlay.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .client import ClientHandle, FrameView

KICK_CSV_HEADER = ("impulse_s", "speed_mps")


@dataclass
class FrameLog:
    """An in-memory table of captured detection frames."""

    frames: list

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def duration(self) -> float:
        if len(self.frames) < 2:
            return 0.0
        return self.frames[-1].t - self.frames[0].t

    def to_csv(self, path) -> None:
        """Wide table: time, frame number, ball, then x/y/theta per robot."""
        robots = []
        for f in self.frames:
            for r in f.robots:
                if (r.team, r.number) not in robots:
                    robots.append((r.team, r.number))
        header = ["t_s", "frame", "ball_x_m", "ball_y_m"]
        for team, number in robots:
            header += [f"{team}{number}_x_m", f"{team}{number}_y_m", f"{team}{number}_theta_rad"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for f in self.frames:
                row = [f.t, f.frame]
                row += list(f.ball) if f.ball is not None else ["", ""]
                for team, number in robots:
                    r = f.robot(team, number)
                    row += [r.x, r.y, r.theta] if r is not None else ["", "", ""]
                writer.writerow(row)

    def ball_speeds(self, span: int = 3) -> list:
        """(t, speed) estimates by finite differences over `span` frames."""
        pts = [(f.t, f.ball) for f in self.frames if f.ball is not None]
        out = []
        for i in range(span, len(pts)):
            t0, p0 = pts[i - span]
            t1, p1 = pts[i]
            if t1 <= t0:
                continue
            dist = math.hypot(p1[0] - p0[0], p1[1] - p0[1])
            out.append(((t0 + t1) / 2.0, dist / (t1 - t0)))
        return out

    def peak_ball_speed(self, span: int = 3) -> float:
        """Initial speed estimate for one logged kick."""
        speeds = [s for _, s in self.ball_speeds(span)]
        return max(speeds) if speeds else 0.0

    def fit_deceleration(self, span: int = 4, band=(0.15, 0.90)) -> float:
        """Slope of the speed-vs-time curve over the clearly-moving band."""
        pts = [(t, s) for t, s in self.ball_speeds(span) if band[0] < s < band[1]]
        if len(pts) < 2:
            raise ValueError("not enough moving-ball samples to fit a slope")
        ts = np.array([p[0] for p in pts])
        ss = np.array([p[1] for p in pts])
        return float(np.polyfit(ts, ss, 1)[0])


def log_frames(handle: ClientHandle, duration: float, timeout: float = 10.0) -> FrameLog:
    """Capture `duration` seconds of detections (measured in frame time).

    Uses a lossless subscription, so no frame is skipped even when the
    service runs faster than real time.
    """
    frames: list = []
    if duration <= 0:
        return FrameLog(frames)
    with handle.subscribe_frames() as feed:
        first = feed.next(timeout=timeout)
        frames.append(first)
        while True:
            frame = feed.next(timeout=timeout)
            if frame.t - first.t > duration + 1e-9:
                break
            frames.append(frame)
    return FrameLog(frames)


def save_kick_samples(path, samples: Sequence) -> None:
    """Write (impulse_s, speed_mps) rows in the calibration CSV schema."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(KICK_CSV_HEADER)
        for impulse, speed in samples:
            writer.writerow([repr(float(impulse)), repr(float(speed))])


def fit_quadratic(samples: Sequence) -> tuple:
    """Least-squares quadratic speed(t) = c0 + c1 t + c2 t^2 over samples."""
    t = np.array([s[0] for s in samples], dtype=float)
    y = np.array([s[1] for s in samples], dtype=float)
    degree = min(2, len(set(t.tolist())) - 1)
    coeffs = np.polynomial.polynomial.polyfit(t, y, degree)
    out = [0.0, 0.0, 0.0]
    for i, c in enumerate(coeffs):
        out[i] = float(c)
    return tuple(out)


def plot_ball_speed(log: FrameLog, path, span: int = 4) -> None:
    """Speed-vs-time figure: finite-difference estimates + linear decay fit."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pts = log.ball_speeds(span)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot([p[0] for p in pts], [p[1] for p in pts], ".", markersize=4,
            label="finite-difference estimate")
    try:
        slope = log.fit_deceleration(span)
        moving = [(t, s) for t, s in pts if 0.15 < s < 0.90]
        ts = np.array([m[0] for m in moving])
        ss = np.array([m[1] for m in moving])
        intercept = float(np.mean(ss) - slope * np.mean(ts))
        tt = np.linspace(min(ts), max(ts) + 0.5, 40)
        ax.plot(tt, np.clip(slope * tt + intercept, 0, None), "-",
                label=f"linear fit: {slope:.3f} m/s^2")
    except ValueError:
        pass
    ax.set_xlabel("time (s)")
    ax.set_ylabel("ball speed (m/s)")
    ax.legend()
    ax.set_title("estimated ball speed vs time")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_kick_fit(samples: Sequence, path, coeffs: Optional[tuple] = None) -> None:
    """Speed-vs-impulse figure with the quadratic best fit overlaid."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if coeffs is None:
        coeffs = fit_quadratic(samples)
    c0, c1, c2 = coeffs
    t = np.array([s[0] for s in samples], dtype=float)
    y = np.array([s[1] for s in samples], dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t * 1000, y, ".", markersize=5, label="sampled kicks")
    tt = np.linspace(0, max(t), 100)
    ax.plot(tt * 1000, np.clip(c0 + c1 * tt + c2 * tt * tt, 0, None), "--",
            label="quadratic best fit")
    ax.set_xlabel("impulse duration (ms)")
    ax.set_ylabel("ball speed (m/s)")
    ax.legend()
    ax.set_title("kick calibration samples and fit")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
