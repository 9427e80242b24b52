"""Deformable template matching for grayscale images.

A parametric affine-plus-sinusoidal deformation model scored by a robust
smooth-Huber data term and shaped priors; matches are MAP estimates found
by exhaustive translation search followed by Nelder-Mead refinement.
"""

from .image import GrayImage, Rect, crop, load_pgm, sample_bilinear, save_pgm
from .kernels import BACKEND
from .objective import (
    ObjectiveValue,
    bessel_k1,
    data_term,
    likelihood,
    neg_log_posterior,
    smooth_huber,
)
from .optimize import (
    MatchResult,
    OptResult,
    SimplexConfig,
    match_template,
    nelder_mead,
    translation_search,
)
from .priors import (
    Hyperparams,
    PriorBounds,
    log_prior_deformation,
    log_prior_scale,
    log_prior_shear,
    log_prior_total,
    sample_prior,
)
from .transform import (
    TransformParams,
    WarpedPatch,
    affine_matrix,
    local_displacement,
    map_point,
    warp_template,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GrayImage",
    "Hyperparams",
    "MatchResult",
    "ObjectiveValue",
    "OptResult",
    "PriorBounds",
    "Rect",
    "SimplexConfig",
    "TransformParams",
    "WarpedPatch",
    "affine_matrix",
    "bessel_k1",
    "crop",
    "data_term",
    "likelihood",
    "load_pgm",
    "local_displacement",
    "log_prior_deformation",
    "log_prior_scale",
    "log_prior_shear",
    "log_prior_total",
    "map_point",
    "match_template",
    "neg_log_posterior",
    "nelder_mead",
    "sample_bilinear",
    "sample_prior",
    "save_pgm",
    "smooth_huber",
    "translation_search",
    "warp_template",
]
