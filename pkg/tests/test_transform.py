import math

import numpy as np
import pytest

from defmatch.image import GrayImage, sample_bilinear
from defmatch.transform import (
    TransformParams,
    affine_matrix,
    local_displacement,
    map_point,
    warp_template,
)


def test_affine_identity():
    np.testing.assert_allclose(affine_matrix(1, 1, 0, 0), np.eye(2), atol=1e-15)


def test_affine_pure_scale():
    np.testing.assert_allclose(affine_matrix(2, 3, 0, 0), np.diag([2.0, 3.0]), atol=1e-15)


def test_affine_determinant_randomized():
    rng = np.random.Generator(np.random.PCG64(42))
    for _ in range(300):
        sx = math.exp(rng.uniform(-2, 2))
        sy = math.exp(rng.uniform(-2, 2))
        theta = rng.uniform(-math.pi, math.pi)
        phi = rng.uniform(-1.5, 1.5)
        a = affine_matrix(sx, sy, theta, phi)
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        assert abs(det - sx * sy) < 1e-12 * max(1.0, sx * sy)


def test_affine_rotation_is_counter_clockwise():
    a = affine_matrix(1, 1, math.pi / 2, 0)
    np.testing.assert_allclose(a @ np.array([1.0, 0.0]), [0.0, 1.0], atol=1e-15)


def test_affine_domain_errors():
    with pytest.raises(ValueError):
        affine_matrix(0.0, 1, 0, 0)
    with pytest.raises(ValueError):
        affine_matrix(1, 1, 0, math.pi / 2)


def test_local_displacement_zero_amplitude():
    p = TransformParams(alpha=0, beta=0, kx=0.3, ky=0.2, x0=0.3, y0=0.7)
    for x, y in ((0, 0), (3, 5), (10.5, 2.25)):
        assert local_displacement(p, x, y, 16, 16) == (0.0, 0.0)


def test_local_displacement_at_wave_center():
    p = TransformParams(alpha=2.5, beta=-1.5, kx=0.17, ky=0.4, x0=0.25, y0=0.5)
    w, h = 21, 11
    dx, dy = local_displacement(p, 0.25 * (w - 1), 0.5 * (h - 1), w, h)
    assert dx == pytest.approx(2.5)
    assert dy == pytest.approx(-1.5)


def test_local_displacement_half_period():
    # pick kx so the phase at distance delta is exactly pi
    delta = 10.0
    p = TransformParams(alpha=1.0, beta=0.0, kx=1 / (2 * delta), ky=0.0, x0=0.0, y0=0.0)
    dx, dy = local_displacement(p, delta, 0.0, 2, 2)  # center at (0, 0)
    assert dx == pytest.approx(-1.0)
    assert dy == 0.0


def test_local_displacement_bounded():
    rng = np.random.Generator(np.random.PCG64(9))
    p = TransformParams(alpha=1.7, beta=-0.6, kx=0.21, ky=0.09, x0=0.4, y0=0.8)
    for _ in range(200):
        dx, dy = local_displacement(p, rng.uniform(0, 30), rng.uniform(0, 30), 31, 31)
        assert abs(dx) <= abs(p.alpha) + 1e-15
        assert abs(dy) <= abs(p.beta) + 1e-15


def test_map_point_identity():
    p = TransformParams.identity()
    for x, y in ((0, 0), (4, 9), (2.5, 7.25)):
        qx, qy = map_point(p, x, y, 12, 15)
        assert qx == pytest.approx(x, abs=1e-12)
        assert qy == pytest.approx(y, abs=1e-12)


def test_map_point_pure_translation():
    p = TransformParams(dx=5.0, dy=-2.0)
    qx, qy = map_point(p, 3.0, 4.0, 10, 10)
    assert (qx, qy) == (8.0, 2.0)


def test_map_point_scale_about_origin_degenerate_frame():
    # with 1x1 extents the centered frame coincides with the raw frame,
    # so pure scale acts about (0, 0)
    p = TransformParams(sx=2.0, sy=1.0)
    qx, qy = map_point(p, 3.0, 4.0, 1, 1)
    assert (qx, qy) == (6.0, 4.0)


def test_map_point_scale_is_centered():
    p = TransformParams(sx=2.0, sy=1.0)
    w = h = 11  # center at (5, 5)
    assert map_point(p, 5.0, 5.0, w, h) == (5.0, 5.0)
    qx, qy = map_point(p, 7.0, 5.0, w, h)
    assert (qx, qy) == (9.0, 5.0)


def test_map_point_jacobian_matches_affine():
    p = TransformParams(sx=1.3, sy=0.8, theta=0.4, phi=0.3)
    a = affine_matrix(p.sx, p.sy, p.theta, p.phi)
    eps = 1e-6
    x, y, w, h = 6.0, 3.0, 17, 13
    fx1 = map_point(p, x + eps, y, w, h)
    fx0 = map_point(p, x - eps, y, w, h)
    fy1 = map_point(p, x, y + eps, w, h)
    fy0 = map_point(p, x, y - eps, w, h)
    jac = np.array(
        [
            [(fx1[0] - fx0[0]) / (2 * eps), (fy1[0] - fy0[0]) / (2 * eps)],
            [(fx1[1] - fx0[1]) / (2 * eps), (fy1[1] - fy0[1]) / (2 * eps)],
        ]
    )
    np.testing.assert_allclose(jac, a, atol=1e-6)


def _random_image(shape, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    return GrayImage(rng.uniform(size=shape))


def test_warp_identity_bit_exact():
    tmpl = _random_image((13, 18), 21)
    patch = warp_template(tmpl, TransformParams.identity())
    assert np.array_equal(patch.values, tmpl.data)
    assert patch.valid.all()
    assert patch.coverage == 1.0


def test_warp_full_shift_empty():
    tmpl = _random_image((10, 12), 22)
    patch = warp_template(tmpl, TransformParams(dx=12.0))
    assert patch.coverage == 0.0
    assert not patch.valid.any()
    assert np.all(patch.values == 0.0)


def test_warp_constant_image_invariance():
    tmpl = GrayImage(np.full((11, 11), 0.37))
    p = TransformParams(sx=0.5, sy=0.8, theta=0.21, phi=0.1, alpha=0.8, kx=0.03, ky=0.02)
    patch = warp_template(tmpl, p)
    assert patch.coverage > 0
    assert np.allclose(patch.values[patch.valid], 0.37)
    assert np.all(patch.values[~patch.valid] == 0.0)


def test_warp_matches_pointwise_reference():
    # dense kernel against the scalar map_point + sample_bilinear path
    tmpl = _random_image((14, 16), 23)
    p = TransformParams(
        sx=1.2, sy=0.9, theta=0.35, phi=-0.2, alpha=1.1, beta=-0.7,
        kx=0.08, ky=0.05, x0=0.3, y0=0.6, dx=0.7, dy=-1.2,
    )
    patch = warp_template(tmpl, p)
    for y in range(tmpl.height):
        for x in range(tmpl.width):
            qx, qy = map_point(p, x, y, tmpl.width, tmpl.height)
            ref = sample_bilinear(tmpl, qx, qy)
            if ref is None:
                assert not patch.valid[y, x]
            else:
                assert patch.valid[y, x]
                assert patch.values[y, x] == pytest.approx(ref, abs=1e-12)


def test_warp_coverage_definition():
    tmpl = _random_image((9, 9), 24)
    patch = warp_template(tmpl, TransformParams(sx=2.0, sy=2.0))
    assert patch.coverage == pytest.approx(np.count_nonzero(patch.valid) / 81)


def test_params_validity():
    assert TransformParams.identity().is_valid()
    assert not TransformParams(sx=-1).is_valid()
    assert not TransformParams(phi=math.pi / 2).is_valid()
    assert not TransformParams(x0=1.2).is_valid()
