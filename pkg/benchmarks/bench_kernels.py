"""Benchmark the compiled kernels against the numpy fallback.

Times the three kernel primitives and one end-to-end match on the shipped
procedural scene. Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from defmatch.image import crop
from defmatch.kernels import _pure
from defmatch.optimize import match_template
from defmatch.priors import Hyperparams
from defmatch.testimage import RECOVERY_RECT, make_test_image
from defmatch.transform import TransformParams, affine_matrix

try:
    from defmatch.kernels import _fast
except ImportError:
    _fast = None


def _time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_primitives(repeats):
    img = make_test_image()
    template = crop(img, RECOVERY_RECT)
    p = TransformParams(sx=1.25, sy=0.9, theta=0.4, phi=0.3, alpha=1.5, kx=0.03, ky=0.03)
    a = affine_matrix(p.sx, p.sy, p.theta, p.phi)
    args = (
        template.data, a[0, 0], a[0, 1], a[1, 0], a[1, 1],
        p.alpha, p.beta, p.kx, p.ky,
        p.x0 * (template.width - 1), p.y0 * (template.height - 1), p.dx, p.dy,
    )
    backends = [("python", _pure)] + ([("ext", _fast)] if _fast else [])

    print(f"primitives ({template.width}x{template.height} template, "
          f"{img.width}x{img.height} image, best of {repeats}):")
    results = {}
    for name, mod in backends:
        values, valid = mod.warp(*args)
        t_warp = _time(lambda: mod.warp(*args), repeats)
        t_huber = _time(lambda: mod.huber_sum(img.data, values, valid, 88, 88, 0.1), repeats)
        t_ssd = _time(lambda: mod.ssd_sum(img.data, values, valid, 88, 88), repeats)
        results[name] = (t_warp, t_huber, t_ssd)
        print(f"  {name:7s} warp {1e6 * t_warp:8.1f} us   "
              f"huber_sum {1e6 * t_huber:7.1f} us   ssd_sum {1e6 * t_ssd:7.1f} us")
    if len(results) == 2:
        ratios = [results["python"][i] / results["ext"][i] for i in range(3)]
        print(f"  speedup ext vs python: warp {ratios[0]:.1f}x, "
              f"huber {ratios[1]:.1f}x, ssd {ratios[2]:.1f}x")

    # cross-check while both are loaded
    if _fast is not None:
        v1, m1 = _pure.warp(*args)
        v2, m2 = _fast.warp(*args)
        assert np.array_equal(m1, m2) and np.allclose(v1, v2, atol=1e-12)
        print("  backends agree on the warp output")


def bench_match():
    import defmatch.kernels as k

    img = make_test_image()
    template = crop(img, RECOVERY_RECT)
    t0 = time.perf_counter()
    result = match_template(img, template, Hyperparams())
    elapsed = time.perf_counter() - t0
    print(f"end-to-end match ({k.BACKEND} backend): {elapsed:.2f}s, "
          f"{result.refined.iterations} simplex iterations, matched={result.matched}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()
    if _fast is None:
        print("note: compiled extension not available, timing the fallback only")
    bench_primitives(args.repeats)
    bench_match()


if __name__ == "__main__":
    main()
