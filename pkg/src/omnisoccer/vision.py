"""Plane-to-plane homography calibration and pixel/field transforms.

The overhead camera sees four fixed fiducial markers whose corner points
have known field coordinates, giving up to 16 pixel/field correspondences.
A direct linear transform (with Hartley-style coordinate normalization for
conditioning) fits the 3x3 homography mapping pixel coordinates to field
coordinates in meters. Because four points already determine a homography,
the surplus points let us verify the calibration and check that the whole
field is visible in the image.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Vec2

DEFAULT_TOLERANCE = 0.01  # m, max reprojection residual for a passing calibration


class VisionError(ValueError):
    """Calibration or projection failure."""


class InsufficientPointsError(VisionError):
    """Fewer than the four correspondences a homography needs."""


class DegenerateConfigurationError(VisionError):
    """Correspondences do not determine a unique homography."""


@dataclass(frozen=True)
class Correspondence:
    """One fiducial observation: pixel position and ground-truth field position."""

    u: float  # px
    v: float  # px
    x: float  # m
    y: float  # m

    def __post_init__(self) -> None:
        for val in (self.u, self.v, self.x, self.y):
            if not math.isfinite(val):
                raise VisionError(f"non-finite correspondence value: {val!r}")


@dataclass(frozen=True)
class ImageGeometry:
    """Camera image extent after cropping."""

    width: int = 820
    height: int = 635

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise VisionError("image dimensions must be positive")


class Homography:
    """3x3 projective map from pixel coordinates to field coordinates.

    Normalized so H[2][2] == 1; must be invertible.
    """

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise VisionError(f"homography must be 3x3, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise VisionError("homography contains non-finite entries")
        if abs(m[2, 2]) < 1e-12:
            raise VisionError("homography scale entry is ~0; cannot normalize")
        m = m / m[2, 2]
        if abs(np.linalg.det(m)) <= 1e-12:
            raise VisionError("homography is singular")
        m.setflags(write=False)
        self.matrix = m

    def __repr__(self) -> str:
        return f"Homography({self.matrix.tolist()!r})"

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.matrix))

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))


def _apply(matrix: np.ndarray, x: float, y: float) -> tuple:
    p = matrix @ np.array([x, y, 1.0])
    if abs(p[2]) < 1e-12:
        raise VisionError("point maps to infinity under this homography")
    return float(p[0] / p[2]), float(p[1] / p[2])


def pixel_to_field(h: Homography, u: float, v: float) -> Vec2:
    """Map an image point (px) to the field plane (m)."""
    x, y = _apply(h.matrix, u, v)
    return Vec2(x, y)


def field_to_pixel(h: Homography, point: Vec2) -> tuple:
    """Map a field point (m) back to image coordinates (px).

    Exact inverse of :func:`pixel_to_field`.
    """
    return _apply(np.linalg.inv(h.matrix), point.x, point.y)


def _normalization(points: np.ndarray) -> np.ndarray:
    """Similarity transform moving the centroid to 0 with mean distance sqrt(2)."""
    centroid = points.mean(axis=0)
    dist = np.sqrt(((points - centroid) ** 2).sum(axis=1)).mean()
    scale = math.sqrt(2.0) / dist if dist > 0 else 1.0
    return np.array(
        [
            [scale, 0.0, -scale * centroid[0]],
            [0.0, scale, -scale * centroid[1]],
            [0.0, 0.0, 1.0],
        ]
    )


def fit_homography(correspondences: Sequence[Correspondence]) -> Homography:
    """Least-squares DLT estimate of the pixel->field homography.

    Needs at least 4 correspondences in general position; exact for
    noise-free inputs.
    """
    n = len(correspondences)
    if n < 4:
        raise InsufficientPointsError(
            f"homography needs at least 4 correspondences, got {n}"
        )
    px = np.array([[c.u, c.v] for c in correspondences], dtype=float)
    fl = np.array([[c.x, c.y] for c in correspondences], dtype=float)

    t_px = _normalization(px)
    t_fl = _normalization(fl)
    px_n = (t_px @ np.column_stack([px, np.ones(n)]).T).T
    fl_n = (t_fl @ np.column_stack([fl, np.ones(n)]).T).T

    rows = []
    for (u, v, _), (x, y, _) in zip(px_n, fl_n):
        rows.append([u, v, 1, 0, 0, 0, -x * u, -x * v, -x])
        rows.append([0, 0, 0, u, v, 1, -y * u, -y * v, -y])
    a = np.array(rows)

    _, s, vh = np.linalg.svd(a)
    # a unique solution needs rank 8, i.e. the 8th singular value well clear
    # of zero (the 9th is the solution direction and may be exactly zero)
    if s[0] == 0.0 or s[7] / s[0] < 1e-10:
        raise DegenerateConfigurationError(
            "correspondences are degenerate (collinear or coincident points)"
        )
    h_norm = vh[-1].reshape(3, 3)
    h = np.linalg.inv(t_fl) @ h_norm @ t_px
    try:
        return Homography(h)
    except VisionError as exc:
        raise DegenerateConfigurationError(str(exc)) from exc


@dataclass(frozen=True)
class CalibrationReport:
    """Outcome of checking a fitted homography against known points."""

    homography: Homography
    residuals: tuple  # m, one per correspondence
    max_residual: float  # m
    worst_index: int
    tolerance: float  # m
    field_visible: bool
    passed: bool

    def summary(self) -> str:
        """Human-readable structured record."""
        lines = [
            f"calibration: {'PASS' if self.passed else 'FAIL'}",
            f"points: {len(self.residuals)}",
            f"max residual: {self.max_residual * 1000:.3f} mm "
            f"(tolerance {self.tolerance * 1000:.3f} mm, worst point #{self.worst_index})",
            f"field visible: {'yes' if self.field_visible else 'no'}",
        ]
        for i, r in enumerate(self.residuals):
            lines.append(f"  point {i:2d}: {r * 1000:8.4f} mm")
        return "\n".join(lines)


def verify_calibration(
    h: Homography,
    correspondences: Sequence[Correspondence],
    tolerance: float = DEFAULT_TOLERANCE,
    field_corners: Optional[Sequence[Vec2]] = None,
    image: Optional[ImageGeometry] = None,
) -> CalibrationReport:
    """Compare mapped pixel points with their ground-truth field positions.

    Passes iff the worst residual is within tolerance and, when field
    corners and image geometry are supplied, the whole field is visible.
    """
    if tolerance <= 0.0:
        raise VisionError("tolerance must be positive")
    residuals = []
    for c in correspondences:
        mapped = pixel_to_field(h, c.u, c.v)
        residuals.append(mapped.distance_to(Vec2(c.x, c.y)))
    max_residual = max(residuals) if residuals else 0.0
    worst = residuals.index(max_residual) if residuals else -1
    visible = True
    if field_corners is not None and image is not None:
        visible = check_field_visible(h, field_corners, image)
    return CalibrationReport(
        homography=h,
        residuals=tuple(residuals),
        max_residual=max_residual,
        worst_index=worst,
        tolerance=tolerance,
        field_visible=visible,
        passed=bool(max_residual <= tolerance and visible),
    )


def check_field_visible(
    h: Homography, field_corners: Sequence[Vec2], image: ImageGeometry
) -> bool:
    """True iff every field corner projects strictly inside the image."""
    for corner in field_corners:
        try:
            u, v = field_to_pixel(h, corner)
        except VisionError:
            return False
        if not (0.0 < u < image.width and 0.0 < v < image.height):
            return False
    return True


CSV_HEADER = ("u_px", "v_px", "x_m", "y_m")


def save_correspondences(path, correspondences: Sequence[Correspondence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for c in correspondences:
            writer.writerow([repr(c.u), repr(c.v), repr(c.x), repr(c.y)])


def load_correspondences(path) -> list:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != list(CSV_HEADER):
            raise VisionError(
                f"expected CSV header {','.join(CSV_HEADER)}, got {header!r}"
            )
        for row in reader:
            if not row:
                continue
            out.append(Correspondence(*(float(v) for v in row[:4])))
    return out
