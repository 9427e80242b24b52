"""MAP estimation: exhaustive translation search for initialization, then
Nelder-Mead simplex refinement of all twelve parameters.

Translation is split across the two stages: the integer placement (u, v)
found by the exhaustive search stays fixed, and the continuous (dx, dy)
inside the warp start at 0 and refine around it; the reported total
translation is (u + dx, v + dy). Scales are optimized as log(sx), log(sy)
so positivity holds by construction; shear and the wave center are kept
raw and rejected with a +inf objective outside their domains, never
clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .image import GrayImage
from .objective import DEFAULT_COVERAGE_FLOOR, neg_log_posterior
from .priors import Hyperparams
from .transform import TransformParams, warp_template
from . import kernels


class SearchError(RuntimeError):
    """Raised when the translation grid contains no feasible placement."""


# optimization vector layout: scales enter in log-space
VECTOR_FIELDS = ("sx", "sy", "theta", "phi", "alpha", "beta",
                 "kx", "ky", "x0", "y0", "dx", "dy")

_TWO_DEG = math.radians(2.0)

# per-field initial simplex offsets: 0.05 for log-scales, 2 degrees for
# angles, 1 px for amplitudes and translations, 0.005 for wavenumbers,
# 0.05 for the wave center
DEFAULT_PARAM_STEPS = (0.05, 0.05, _TWO_DEG, _TWO_DEG, 1.0, 1.0,
                       0.005, 0.005, 0.05, 0.05, 1.0, 1.0)


def encode_params(params: TransformParams) -> np.ndarray:
    vec = np.array([getattr(params, f) for f in VECTOR_FIELDS], dtype=np.float64)
    vec[0] = math.log(params.sx)
    vec[1] = math.log(params.sy)
    return vec


def decode_params(vec) -> TransformParams:
    kwargs = {f: float(v) for f, v in zip(VECTOR_FIELDS, vec)}
    kwargs["sx"] = math.exp(kwargs["sx"])
    kwargs["sy"] = math.exp(kwargs["sy"])
    return TransformParams(**kwargs)


@dataclass(frozen=True)
class SimplexConfig:
    """Nelder-Mead coefficients and termination settings.

    f_tol is the absolute spread of vertex values, x_tol the simplex
    diameter in the max norm. init_steps gives per-coordinate offsets for
    the initial simplex; None selects 0.1 per coordinate for generic
    vectors and DEFAULT_PARAM_STEPS inside match_template.
    """

    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_iters: int = 2000
    f_tol: float = 1e-8
    x_tol: float = 1e-6
    init_steps: Optional[Sequence[float]] = None
    restarts: int = 6

    def __post_init__(self):
        if self.reflection <= 0.0:
            raise ValueError("reflection coefficient must be > 0")
        if self.expansion <= self.reflection:
            raise ValueError("expansion coefficient must exceed reflection")
        if not 0.0 < self.contraction < 1.0:
            raise ValueError("contraction coefficient must be in (0, 1)")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink coefficient must be in (0, 1)")
        if self.restarts < 0:
            raise ValueError("restarts must be >= 0")


@dataclass(frozen=True)
class OptResult:
    """Best vertex of the final simplex."""

    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    trace: tuple = ()


@dataclass(frozen=True)
class MatchResult:
    placement: tuple
    params: TransformParams
    refined: OptResult
    matched: bool
    threshold: float
    mean_data_term: float

    @property
    def total_translation(self) -> tuple:
        return (self.placement[0] + self.params.dx, self.placement[1] + self.params.dy)


def nelder_mead(f: Callable, x0, cfg: SimplexConfig = SimplexConfig()) -> OptResult:
    """Minimize f over real vectors with the classic simplex moves.

    +inf objective values are legal and rank worst, which is how domain
    exclusions reach the optimizer. Raises if f is not finite at x0.

    After each converged descent the simplex is rebuilt full-size around
    the best point and descent resumes, up to cfg.restarts times. A
    rebuild that brings no improvement is retried with three-fold larger
    offsets (twice at most) before giving up: the fresh, wider simplex
    recovers search directions lost to premature contraction.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    f0 = float(f(x0))
    if not math.isfinite(f0):
        raise ValueError(f"objective not finite at the start point: {f0}")

    best = _simplex_descent(f, x0, f0, cfg, iteration_base=0, trace=[], step_scale=1.0)
    scale = 1.0
    for _ in range(cfg.restarts):
        again = _simplex_descent(
            f, best.x, best.value, cfg,
            iteration_base=best.iterations, trace=list(best.trace), step_scale=scale,
        )
        improved = again.value < best.value
        best = again  # never worse than its start point
        if improved:
            scale = 1.0
        else:
            scale *= 3.0
            if scale > 10.0:
                break
    return best


def _simplex_descent(f, x0, f0, cfg: SimplexConfig, iteration_base: int,
                     trace: list, step_scale: float) -> OptResult:
    n = x0.size
    if cfg.init_steps is None:
        steps = np.full(n, 0.1)
    else:
        steps = np.asarray(cfg.init_steps, dtype=np.float64)
        if steps.size != n:
            raise ValueError(f"init_steps has {steps.size} entries for a {n}-vector")
    steps = steps * step_scale

    verts = [x0.copy()]
    vals = [f0]
    for i in range(n):
        p = x0.copy()
        p[i] += steps[i]
        verts.append(p)
        vals.append(float(f(p)))

    iterations = iteration_base
    converged = False
    while iterations < iteration_base + cfg.max_iters:
        order = sorted(range(n + 1), key=lambda i: vals[i])
        i_best = order[0]
        i_worst = order[-1]
        i_second = order[-2]
        f_best = vals[i_best]
        f_worst = vals[i_worst]

        spread = f_worst - f_best
        diam = max(np.max(np.abs(verts[i] - verts[i_best])) for i in range(n + 1) if i != i_best)
        if (math.isfinite(spread) and spread <= cfg.f_tol) or diam <= cfg.x_tol:
            converged = True
            break

        iterations += 1
        centroid = (np.sum(verts, axis=0) - verts[i_worst]) / n
        direction = centroid - verts[i_worst]

        x_refl = centroid + cfg.reflection * direction
        f_refl = float(f(x_refl))
        if f_refl < f_best:
            x_exp = centroid + cfg.expansion * direction
            f_exp = float(f(x_exp))
            if f_exp < f_refl:
                verts[i_worst], vals[i_worst] = x_exp, f_exp
            else:
                verts[i_worst], vals[i_worst] = x_refl, f_refl
        elif f_refl < vals[i_second]:
            verts[i_worst], vals[i_worst] = x_refl, f_refl
        else:
            if f_refl < f_worst:
                x_h, f_h = x_refl, f_refl
            else:
                x_h, f_h = verts[i_worst], f_worst
            x_con = centroid + cfg.contraction * (x_h - centroid)
            f_con = float(f(x_con))
            if f_con < f_h:
                verts[i_worst], vals[i_worst] = x_con, f_con
            else:
                anchor = verts[i_best]
                for i in range(n + 1):
                    if i == i_best:
                        continue
                    verts[i] = anchor + cfg.shrink * (verts[i] - anchor)
                    vals[i] = float(f(verts[i]))
        trace.append((iterations, min(vals)))

    i_best = min(range(n + 1), key=lambda i: vals[i])
    return OptResult(
        x=verts[i_best].copy(),
        value=vals[i_best],
        iterations=iterations,
        converged=converged,
        trace=tuple(trace),
    )


def translation_search(
    image: GrayImage,
    template: GrayImage,
    base_params: TransformParams,
    stride: int,
    hyper: Hyperparams,
    coverage_floor: float = DEFAULT_COVERAGE_FLOOR,
):
    """Exhaustive data-term scan over integer placements.

    Walks the stride-grid over every placement with any overlap, skips
    those whose both-sides-valid coverage falls below the floor, and
    returns the argmin (u, v, S/n). Placements are ranked by the
    per-pixel mean data term, not the raw sum: partial-overlap cells at
    the image border carry fewer residual terms and a raw-sum ranking
    would reward them for covering less. Ties break to the smallest u,
    then v.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    patch = warp_template(template, base_params)
    w, h = template.width, template.height
    n_pixels = w * h
    best = None
    for u in range(-(w - 1), image.width, stride):
        for v in range(-(h - 1), image.height, stride):
            s, n_valid = kernels.huber_sum(image.data, patch.values, patch.valid, u, v, hyper.tau)
            if n_valid / n_pixels < coverage_floor:
                continue
            mean = s / n_valid
            if best is None or mean < best[0]:
                best = (mean, u, v)
    if best is None:
        raise SearchError("no placement reaches the coverage floor")
    return best[1], best[2], best[0]


def match_template(
    image: GrayImage,
    template: GrayImage,
    hyper: Hyperparams,
    simplex_cfg: Optional[SimplexConfig] = None,
    stride: int = 1,
    mode: str = "eq10",
    match_threshold: float = 0.5,
    coverage_floor: float = DEFAULT_COVERAGE_FLOOR,
) -> MatchResult:
    """Two-stage MAP match: placement scan, then 12-parameter refinement.

    The match decision thresholds the per-pixel mean data term at the
    refined optimum so the criterion does not scale with template size.
    """
    cfg = simplex_cfg or SimplexConfig()
    if cfg.init_steps is None:
        cfg = SimplexConfig(
            reflection=cfg.reflection, expansion=cfg.expansion,
            contraction=cfg.contraction, shrink=cfg.shrink,
            max_iters=cfg.max_iters, f_tol=cfg.f_tol, x_tol=cfg.x_tol,
            init_steps=DEFAULT_PARAM_STEPS,
        )

    u, v, _ = translation_search(
        image, template, TransformParams.identity(), stride, hyper, coverage_floor
    )

    half_pi = math.pi / 2

    def objective(vec) -> float:
        if not np.all(np.isfinite(vec)) or abs(vec[0]) > 50.0 or abs(vec[1]) > 50.0:
            return math.inf
        p = decode_params(vec)
        if abs(p.phi) >= half_pi or not (0.0 <= p.x0 <= 1.0 and 0.0 <= p.y0 <= 1.0):
            return math.inf
        return neg_log_posterior(
            image, template, p, u, v, hyper, mode, coverage_floor
        ).neg_log_posterior

    refined = nelder_mead(objective, encode_params(TransformParams.identity()), cfg)
    params = decode_params(refined.x)
    final = neg_log_posterior(image, template, params, u, v, hyper, mode, coverage_floor)
    mean_data = final.data_term / final.n_valid if final.n_valid else math.inf
    return MatchResult(
        placement=(u, v),
        params=params,
        refined=refined,
        matched=mean_data <= match_threshold,
        threshold=match_threshold,
        mean_data_term=mean_data,
    )
