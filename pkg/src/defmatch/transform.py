"""Parametric template transformation: affine composition plus a radial
sinusoidal displacement field, and dense template warping.

The warp is a coordinate lookup: the output patch at template pixel (x, y)
samples the template at ``A (x, y) + D(x, y) + d``. With this convention
the on-screen effect of a parameter is the inverse of its name (sx = 2
shows the template shrunk, not magnified); synthesis and matching both use
the same lookup so recovered parameters are directly comparable.

The affine part acts about the template's geometric center: coordinates
are taken relative to ((w-1)/2, (h-1)/2) and re-offset afterwards, so
rotation and scale keep the object in frame. The displacement field is
evaluated in raw template-frame coordinates, with its wave center stored
normalized to [0, 1]^2 and scaled by the extents at evaluation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .image import GrayImage


@dataclass(frozen=True)
class TransformParams:
    """The twelve warp parameters.

    sx, sy      anisotropic scale factors (> 0)
    theta       rotation, radians, counter-clockwise with y down
    phi         x-axis shear angle, radians, |phi| < pi/2
    alpha, beta displacement amplitudes, pixels
    kx, ky      wavenumbers, cycles per pixel
    x0, y0      wave center in normalized template coordinates [0, 1]
    dx, dy      translation, pixels
    """

    sx: float = 1.0
    sy: float = 1.0
    theta: float = 0.0
    phi: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    kx: float = 0.0
    ky: float = 0.0
    x0: float = 0.5
    y0: float = 0.5
    dx: float = 0.0
    dy: float = 0.0

    @classmethod
    def identity(cls) -> "TransformParams":
        return cls()

    def is_valid(self) -> bool:
        return (
            self.sx > 0.0
            and self.sy > 0.0
            and abs(self.phi) < math.pi / 2
            and 0.0 <= self.x0 <= 1.0
            and 0.0 <= self.y0 <= 1.0
        )

    def with_(self, **updates) -> "TransformParams":
        return replace(self, **updates)


# external parameter names, used by config files, the CLI and reports
PARAM_NAMES = (
    "s_x", "s_y", "theta", "phi", "alpha", "beta",
    "k_x", "k_y", "x0", "y0", "d_x", "d_y",
)

_FIELD_FOR_NAME = {
    "s_x": "sx", "s_y": "sy", "theta": "theta", "phi": "phi",
    "alpha": "alpha", "beta": "beta", "k_x": "kx", "k_y": "ky",
    "x0": "x0", "y0": "y0", "d_x": "dx", "d_y": "dy",
}


def param_field(name: str) -> str:
    """Map an external parameter name (e.g. 's_x') to its field name."""
    try:
        return _FIELD_FOR_NAME[name]
    except KeyError:
        raise ValueError(f"unknown parameter {name!r}, expected one of {PARAM_NAMES}") from None


@dataclass(frozen=True)
class WarpedPatch:
    """Warped template values with per-pixel validity.

    values has the template's extents; pixels whose source sample fell
    outside the template carry value 0 and valid False. coverage is the
    valid fraction.
    """

    values: np.ndarray
    valid: np.ndarray
    coverage: float


def affine_matrix(sx: float, sy: float, theta: float, phi: float) -> np.ndarray:
    """Composed 2x2 linear map: scale . rotation . x-shear.

    S = diag(sx, sy); R = [[cos, -sin], [sin, cos]] (counter-clockwise);
    Ux = [[1, tan(phi)], [0, 1]]. det = sx * sy for any valid input.
    """
    if sx <= 0.0 or sy <= 0.0:
        raise ValueError(f"scales must be positive, got ({sx}, {sy})")
    if not abs(phi) < math.pi / 2:
        raise ValueError(f"shear angle {phi} outside (-pi/2, pi/2)")
    c, s = math.cos(theta), math.sin(theta)
    t = math.tan(phi)
    return np.array(
        [
            [sx * c, sx * (c * t - s)],
            [sy * s, sy * (s * t + c)],
        ]
    )


def local_displacement(params: TransformParams, x: float, y: float, w: int, h: int):
    """Radially phased cosine displacement at template-frame (x, y)."""
    wcx = params.x0 * (w - 1)
    wcy = params.y0 * (h - 1)
    delta = math.sqrt((x - wcx) ** 2 + (y - wcy) ** 2)
    return (
        params.alpha * math.cos(2.0 * math.pi * params.kx * delta),
        params.beta * math.cos(2.0 * math.pi * params.ky * delta),
    )


def map_point(params: TransformParams, x: float, y: float, w: int, h: int):
    """Source coordinate sampled by the warp for template pixel (x, y)."""
    a = affine_matrix(params.sx, params.sy, params.theta, params.phi)
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    xc = x - cx
    yc = y - cy
    ddx, ddy = local_displacement(params, x, y, w, h)
    return (
        a[0, 0] * xc + a[0, 1] * yc + cx + ddx + params.dx,
        a[1, 0] * xc + a[1, 1] * yc + cy + ddy + params.dy,
    )


def warp_template(template: GrayImage, params: TransformParams) -> WarpedPatch:
    """Evaluate the warp densely over the template's own pixel grid."""
    a = affine_matrix(params.sx, params.sy, params.theta, params.phi)
    w, h = template.width, template.height
    values, valid = kernels.warp(
        template.data,
        a[0, 0], a[0, 1], a[1, 0], a[1, 1],
        params.alpha, params.beta, params.kx, params.ky,
        params.x0 * (w - 1), params.y0 * (h - 1),
        params.dx, params.dy,
    )
    coverage = float(np.count_nonzero(valid)) / (w * h)
    return WarpedPatch(values=values, valid=valid, coverage=coverage)
