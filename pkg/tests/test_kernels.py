import math

import numpy as np
import pytest

from defmatch import kernels
from defmatch.kernels import _pure

try:
    from defmatch.kernels import _fast
except ImportError:
    _fast = None

needs_ext = pytest.mark.skipif(_fast is None, reason="compiled extension not built")


def _random_case(seed, shape_img=(40, 37), shape_tmpl=(12, 15)):
    rng = np.random.Generator(np.random.PCG64(seed))
    img = rng.uniform(size=shape_img)
    tmpl = np.ascontiguousarray(rng.uniform(size=shape_tmpl))
    theta = rng.uniform(-0.6, 0.6)
    a = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    a = a @ np.diag(rng.uniform(0.6, 1.6, size=2))
    args = (
        tmpl, a[0, 0], a[0, 1], a[1, 0], a[1, 1],
        rng.uniform(-2, 2), rng.uniform(-2, 2),
        rng.uniform(0, 0.2), rng.uniform(0, 0.2),
        rng.uniform(0, shape_tmpl[1] - 1), rng.uniform(0, shape_tmpl[0] - 1),
        rng.uniform(-3, 3), rng.uniform(-3, 3),
    )
    return img, args


@needs_ext
@pytest.mark.parametrize("seed", range(8))
def test_backends_agree_on_warp(seed):
    _, args = _random_case(seed)
    v_ext, m_ext = _fast.warp(*args)
    v_py, m_py = _pure.warp(*args)
    assert np.array_equal(m_ext, m_py)
    np.testing.assert_allclose(v_ext, v_py, atol=1e-12, rtol=0)


@needs_ext
@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("u,v", [(0, 0), (5, 7), (-4, -3), (30, 33), (-100, 0)])
def test_backends_agree_on_sums(seed, u, v):
    img, args = _random_case(seed)
    values, valid = _pure.warp(*args)
    h_ext = _fast.huber_sum(img, values, valid, u, v, 0.1)
    h_py = _pure.huber_sum(img, values, valid, u, v, 0.1)
    assert h_ext[1] == h_py[1]
    assert h_ext[0] == pytest.approx(h_py[0], rel=1e-12, abs=1e-12)
    s_ext = _fast.ssd_sum(img, values, valid, u, v)
    s_py = _pure.ssd_sum(img, values, valid, u, v)
    assert s_ext[1] == s_py[1]
    assert s_ext[0] == pytest.approx(s_py[0], rel=1e-12, abs=1e-12)


def test_huber_sum_against_scalar_loop():
    img, args = _random_case(99)
    values, valid = _pure.warp(*args)
    u, v, tau = 3, -2, 0.17
    s, n = kernels.huber_sum(img, values, valid, u, v, tau)
    s_ref = 0.0
    n_ref = 0
    for y in range(values.shape[0]):
        for x in range(values.shape[1]):
            if not valid[y, x]:
                continue
            yy, xx = v + y, u + x
            if not (0 <= yy < img.shape[0] and 0 <= xx < img.shape[1]):
                continue
            r = (img[yy, xx] - values[y, x]) / tau
            s_ref += math.sqrt(1 + r * r) - 1
            n_ref += 1
    assert n == n_ref
    assert s == pytest.approx(s_ref, rel=1e-10)


def test_empty_overlap():
    img, args = _random_case(5)
    values, valid = _pure.warp(*args)
    assert kernels.huber_sum(img, values, valid, 1000, 0, 0.1) == (0.0, 0)
    assert kernels.ssd_sum(img, values, valid, -1000, 0) == (0.0, 0)


def test_selected_backend_exported():
    assert kernels.BACKEND in ("ext", "python")
