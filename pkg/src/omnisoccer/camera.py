"""Synthetic overhead camera and fabricated fiducial observations.

Stands in for the real camera + marker decoder: a known projective map
between the field plane and the image, plus helpers producing the 16
marker-corner correspondences (four corners of four field markers) that
the calibration pipeline consumes. Observations can be perturbed by pixel
noise or quantized to the pixel grid.
"""

from __future__ import annotations

import math
import random
from typing import Optional, Sequence

import numpy as np

from .geometry import Vec2
from .vision import Correspondence, Homography, ImageGeometry

PIXELS_PER_METER = 1.0 / 0.003  # 3 mm per pixel at the camera's working height
DEFAULT_MARKER_SIZE = 0.10  # m, edge length of a corner fiducial


def make_synthetic_camera(
    image: ImageGeometry = ImageGeometry(),
    pixels_per_meter: float = PIXELS_PER_METER,
    center_offset: tuple = (0.0, 0.0),
    perspective: tuple = (0.010, 0.016),
) -> Homography:
    """Known pixel->field homography of a near-overhead camera.

    The projection places the field origin at the image center (plus
    `center_offset` px), maps +x right and +y up at `pixels_per_meter`,
    and applies a mild perspective tilt so the map is a genuine
    homography rather than an affinity.
    """
    cu = image.width / 2.0 + center_offset[0]
    cv = image.height / 2.0 + center_offset[1]
    gx, gy = perspective
    field_to_px = np.array(
        [
            [pixels_per_meter + gx * cu, gy * cu, cu],
            [-gx * cv, -pixels_per_meter + gy * cv, cv],
            [gx, gy, 1.0],
        ]
    )
    return Homography(np.linalg.inv(field_to_px))


def marker_field_points(
    field_length: float, field_width: float, marker_size: float = DEFAULT_MARKER_SIZE
) -> list:
    """Ground-truth field positions of the 16 corner-marker points.

    One square marker sits centered on each field corner; each contributes
    its four corners.
    """
    half = marker_size / 2.0
    points = []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            cx = sx * field_length / 2.0
            cy = sy * field_width / 2.0
            for dx in (-half, half):
                for dy in (-half, half):
                    points.append(Vec2(cx + dx, cy + dy))
    return points


def observe_points(
    camera: Homography,
    points: Sequence[Vec2],
    noise_sigma_px: float = 0.0,
    rng: Optional[random.Random] = None,
    quantize: bool = False,
) -> list:
    """Project field points through the camera into pixel observations."""
    inv = np.linalg.inv(camera.matrix)
    out = []
    for p in points:
        q = inv @ np.array([p.x, p.y, 1.0])
        u = q[0] / q[2]
        v = q[1] / q[2]
        if noise_sigma_px > 0.0:
            if rng is None:
                raise ValueError("pixel noise requires an explicit rng")
            u += rng.gauss(0.0, noise_sigma_px)
            v += rng.gauss(0.0, noise_sigma_px)
        if quantize:
            u = float(round(u))
            v = float(round(v))
        out.append(Correspondence(float(u), float(v), p.x, p.y))
    return out


def fiducial_correspondences(
    camera: Homography,
    field_length: float,
    field_width: float,
    marker_size: float = DEFAULT_MARKER_SIZE,
    noise_sigma_px: float = 0.0,
    rng: Optional[random.Random] = None,
    quantize: bool = False,
) -> list:
    """The 16 marker-corner correspondences as the detector would report them."""
    return observe_points(
        camera,
        marker_field_points(field_length, field_width, marker_size),
        noise_sigma_px=noise_sigma_px,
        rng=rng,
        quantize=quantize,
    )
