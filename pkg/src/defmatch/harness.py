"""Experiment drivers: objective surfaces over parameter pairs, synthetic
transform-recovery runs, and prior self-checks.

These reproduce the two standard experiments end to end: sweeping a pair
of transformation parameters (typically the scales) to show how the prior
reshapes the error surface, and recovering a known random transformation
applied to a template cropped from the image. Angles are reported in
degrees in all reports; radians internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .image import GrayImage, Rect, crop
from .objective import DEFAULT_COVERAGE_FLOOR, neg_log_posterior
from .optimize import (
    MatchResult,
    SimplexConfig,
    match_template,
    translation_search,
)
from .priors import (
    Hyperparams,
    PriorBounds,
    deformation_normalization,
    goodness_of_fit,
    normal_cdf,
    sample_prior,
    scale_normalization,
    shear_cdf,
    shear_normalization,
    wald_cdf,
)
from .transform import PARAM_NAMES, TransformParams, param_field, warp_template

SURFACE_KINDS = ("raw", "data", "posterior")

_ANGLE_FIELDS = ("theta", "phi")


@dataclass(frozen=True)
class SurfaceGrid:
    """Objective values over a 2-D parameter grid.

    values[i, j] is the objective at (axis1_values[i], axis2_values[j]).
    For kind "raw" the grid is rescaled so its maximum equals 1 exactly.
    """

    axis1_name: str
    axis2_name: str
    axis1_values: np.ndarray
    axis2_values: np.ndarray
    values: np.ndarray
    kind: str

    def to_csv_text(self) -> str:
        """Two header lines (axis name + samples), then the value grid.

        Floats are emitted with repr, which round-trips exactly and never
        depends on locale.
        """
        lines = [
            ",".join([self.axis1_name] + [repr(v) for v in self.axis1_values.tolist()]),
            ",".join([self.axis2_name] + [repr(v) for v in self.axis2_values.tolist()]),
        ]
        for row in self.values.tolist():
            lines.append(",".join(repr(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv_text())


def surface_from_csv(path, kind: str = "unknown") -> SurfaceGrid:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    head1 = lines[0].split(",")
    head2 = lines[1].split(",")
    values = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[2:]])
    return SurfaceGrid(
        axis1_name=head1[0],
        axis2_name=head2[0],
        axis1_values=np.array([float(t) for t in head1[1:]]),
        axis2_values=np.array([float(t) for t in head2[1:]]),
        values=values,
        kind=kind,
    )


def surface_sweep(
    image: GrayImage,
    template: GrayImage,
    param_pair,
    ranges,
    n_samples,
    fixed: TransformParams = TransformParams.identity(),
    hyper: Hyperparams = Hyperparams(),
    kind: str = "posterior",
    placement=None,
    mode: str = "eq10",
    coverage_floor: float = DEFAULT_COVERAGE_FLOOR,
) -> SurfaceGrid:
    """Evaluate the chosen objective over a 2-D parameter grid.

    param_pair uses external parameter names (e.g. ("s_x", "s_y")).
    ranges is ((lo1, hi1), (lo2, hi2)) and n_samples an int or pair.
    placement is the integer (u, v) template position; None runs the
    exhaustive search with the fixed parameters first.

    Kinds: "raw" is the plain sum of squared residuals over valid pixels,
    max-normalized to 1; "data" the robust data term; "posterior" the
    negative log-posterior (coverage floor applies to this kind only).
    """
    name1, name2 = param_pair
    field1 = param_field(name1)
    field2 = param_field(name2)
    if kind not in SURFACE_KINDS:
        raise ValueError(f"kind must be one of {SURFACE_KINDS}, got {kind!r}")
    if isinstance(n_samples, int):
        n1 = n2 = n_samples
    else:
        n1, n2 = n_samples
    if n1 < 2 or n2 < 2:
        raise ValueError("need at least 2 samples per axis")
    (lo1, hi1), (lo2, hi2) = ranges
    axis1 = np.linspace(lo1, hi1, n1)
    axis2 = np.linspace(lo2, hi2, n2)

    if placement is None:
        u, v, _ = translation_search(image, template, fixed, 1, hyper, coverage_floor)
    else:
        u, v = placement

    values = np.empty((n1, n2))
    for i, p1 in enumerate(axis1):
        for j, p2 in enumerate(axis2):
            params = fixed.with_(**{field1: float(p1), field2: float(p2)})
            if kind == "posterior":
                values[i, j] = neg_log_posterior(
                    image, template, params, u, v, hyper, mode, coverage_floor
                ).neg_log_posterior
            elif kind == "data":
                patch = warp_template(template, params)
                s, _ = kernels.huber_sum(
                    image.data, patch.values, patch.valid, u, v, hyper.tau
                )
                values[i, j] = s
            else:
                patch = warp_template(template, params)
                s, _ = kernels.ssd_sum(image.data, patch.values, patch.valid, u, v)
                values[i, j] = s

    if kind == "raw":
        peak = values.max()
        if peak > 0.0:
            values = values / peak
    return SurfaceGrid(
        axis1_name=name1,
        axis2_name=name2,
        axis1_values=axis1,
        axis2_values=axis2,
        values=values,
        kind=kind,
    )


# ---------------------------------------------------------------------------
# synthetic recovery experiment


@dataclass(frozen=True)
class RecoveryReport:
    """Ground truth vs recovery, in the actual/estimated/deviation layout."""

    seed: int
    rect: Rect
    true_params: TransformParams
    match: MatchResult
    absolute_deviation: dict

    @property
    def estimated_params(self) -> TransformParams:
        return self.match.params


def _wrap_angle_deg(delta_rad: float) -> float:
    """Absolute angular difference in degrees, shortest way around."""
    d = math.degrees(delta_rad) % 360.0
    return min(d, 360.0 - d)


def compose_working_image(image: GrayImage, rect: Rect, params: TransformParams):
    """Composite the warped crop back onto the image at its origin.

    Only pixels whose warp sample is valid are replaced; the rest keep
    the original scene, which is what a partially covering deformed
    object looks like to the matcher.
    """
    template = crop(image, rect)
    patch = warp_template(template, params)
    working = image.data.copy()
    window = working[rect.y0 : rect.y0 + rect.h, rect.x0 : rect.x0 + rect.w]
    window[patch.valid] = patch.values[patch.valid]
    return GrayImage(working), template


def default_rect(image: GrayImage, seed: int) -> Rect:
    """Centered square window, jittered a few pixels by the seed."""
    side = min(image.width, image.height) // 3
    rng = np.random.Generator(np.random.PCG64(seed))
    jx = int(rng.integers(-8, 9))
    jy = int(rng.integers(-8, 9))
    x0 = min(max((image.width - side) // 2 + jx, 0), image.width - side)
    y0 = min(max((image.height - side) // 2 + jy, 0), image.height - side)
    return Rect(x0, y0, side, side)


def synth_experiment(
    image: GrayImage,
    rect: Optional[Rect] = None,
    xi_true: Optional[TransformParams] = None,
    seed: int = 0,
    hyper: Hyperparams = Hyperparams(),
    simplex_cfg: Optional[SimplexConfig] = None,
    stride: int = 1,
    mode: str = "eq10",
    match_threshold: float = 0.5,
    bounds: PriorBounds = PriorBounds(),
) -> RecoveryReport:
    """Crop, transform, composite, then try to recover the transformation.

    With xi_true omitted the ground truth is drawn from the prior using
    the seed; with rect omitted the window is placed by the seed. Both
    stages share the warp convention, so deviations compare like with
    like. Per-parameter deviations use total translation (placement plus
    continuous refinement) for d_x, d_y and degrees for the angles.
    """
    if rect is None:
        rect = default_rect(image, seed)
    if xi_true is None:
        rng = np.random.Generator(np.random.PCG64(seed))
        xi_true = sample_prior(hyper, rng, bounds)

    working, template = compose_working_image(image, rect, xi_true)
    match = match_template(
        working, template, hyper,
        simplex_cfg=simplex_cfg, stride=stride, mode=mode,
        match_threshold=match_threshold,
    )

    est = match.params
    true_total = (rect.x0 + xi_true.dx, rect.y0 + xi_true.dy)
    est_total = match.total_translation
    deviation = {}
    for name in PARAM_NAMES:
        f = param_field(name)
        if f in _ANGLE_FIELDS:
            deviation[name] = _wrap_angle_deg(getattr(est, f) - getattr(xi_true, f))
        elif f == "dx":
            deviation[name] = abs(est_total[0] - true_total[0])
        elif f == "dy":
            deviation[name] = abs(est_total[1] - true_total[1])
        else:
            deviation[name] = abs(getattr(est, f) - getattr(xi_true, f))
    return RecoveryReport(
        seed=seed,
        rect=rect,
        true_params=xi_true,
        match=match,
        absolute_deviation=deviation,
    )


# ---------------------------------------------------------------------------
# prior self-checks


def priors_check(hyper: Hyperparams, n_samples: int = 100_000, seed: int = 0):
    """Normalization quadratures and sampler goodness-of-fit.

    Returns (report_text, ok). The report is byte-stable for a fixed
    seed. Chi-square tests run at the 1% level with 50 bins.
    """
    lines = []
    ok = True

    def check(label, value, target, tol):
        nonlocal ok
        good = abs(value - target) <= tol
        ok = ok and good
        lines.append(
            f"{'PASS' if good else 'FAIL'} {label}: {value:.10f} "
            f"(target {target} +- {tol:g})"
        )

    check("deformation prior normalization", deformation_normalization(hyper), 1.0, 1e-4)
    check("scale prior normalization", scale_normalization(hyper), 1.0, 1e-4)
    check("shear prior normalization", shear_normalization(hyper), 1.0, 1e-6)

    rng = np.random.Generator(np.random.PCG64(seed))
    draws = [sample_prior(hyper, rng) for _ in range(n_samples)]

    def gof(label, samples, cdf):
        nonlocal ok
        stat, crit, good = goodness_of_fit(np.asarray(samples), cdf)
        ok = ok and good
        lines.append(
            f"{'PASS' if good else 'FAIL'} {label} goodness-of-fit: "
            f"chi2 {stat:.4f} < {crit:.4f}"
        )

    gof("amplitude sampler", [p.alpha for p in draws],
        lambda t: normal_cdf(t, hyper.sigma_ab))
    gof("scale sampler", [p.sx for p in draws],
        lambda t: wald_cdf(t, hyper.sigma_s))
    lo = shear_cdf(-math.pi / 2, hyper)
    hi = shear_cdf(math.pi / 2, hyper)
    gof("shear sampler", [p.phi for p in draws],
        lambda t: (shear_cdf(t, hyper) - lo) / (hi - lo))

    lines.append("OK" if ok else "FAILED")
    return "\n".join(lines) + "\n", ok
