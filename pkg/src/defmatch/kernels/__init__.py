"""Hot-loop kernels: dense warping and robust residual sums.

Two interchangeable backends provide the same three functions:

* ``_fast``  -- compiled Cython extension, built by setup.py,
* ``_pure``  -- vectorized numpy fallback, always available.

The compiled backend is picked at import when present. Set the
environment variable ``DEFMATCH_BACKEND`` to ``python`` or ``ext`` to
force a choice (forcing ``ext`` raises if the extension is missing).
``benchmarks/bench_kernels.py`` compares the two.

Kernel contract (shared by both backends):

warp(tmpl, a11, a12, a21, a22, alpha, beta, kx, ky, wcx, wcy, dx, dy)
    -> (values, valid): sample ``tmpl`` at A.(p - c) + c + D(p) + d for
    every pixel p of the template grid, bilinear, c the grid center and
    (wcx, wcy) the displacement wave center in pixels. Out-of-domain
    samples give value 0 and valid False.

huber_sum(img, values, valid, u, v, tau) -> (S, n_valid)
    Sum of sqrt(1 + r^2/tau^2) - 1 over residuals r between ``img``
    placed at integer offset (u, v) and the warped values, restricted to
    pixels valid on both sides.

ssd_sum(img, values, valid, u, v) -> (S, n_valid)
    Same restriction, plain sum of squared residuals.
"""

import os

_requested = os.environ.get("DEFMATCH_BACKEND", "").strip().lower()

if _requested in ("", "ext"):
    try:
        from ._fast import huber_sum, ssd_sum, warp

        BACKEND = "ext"
    except ImportError:
        if _requested == "ext":
            raise ImportError(
                "DEFMATCH_BACKEND=ext but the compiled extension is not built; "
                "run `pip install -e .` or unset the variable"
            )
        from ._pure import huber_sum, ssd_sum, warp

        BACKEND = "python"
elif _requested == "python":
    from ._pure import huber_sum, ssd_sum, warp

    BACKEND = "python"
else:
    raise ImportError(f"unknown DEFMATCH_BACKEND={_requested!r}, expected 'ext' or 'python'")

__all__ = ["warp", "huber_sum", "ssd_sum", "BACKEND"]
