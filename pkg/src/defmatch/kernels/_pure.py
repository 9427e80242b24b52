"""Numpy fallback kernels. Same contract as the compiled backend."""

import numpy as np


def warp(tmpl, a11, a12, a21, a22, alpha, beta, kx, ky, wcx, wcy, dx, dy):
    h, w = tmpl.shape
    cx = (w - 1) / 2.0
    cy = (h - 1) / 2.0
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    xc = xs - cx
    yc = ys - cy
    delta = np.sqrt((xs - wcx) ** 2 + (ys - wcy) ** 2)
    two_pi = 2.0 * np.pi
    qx = a11 * xc + a12 * yc + cx + alpha * np.cos(two_pi * kx * delta) + dx
    qy = a21 * xc + a22 * yc + cy + beta * np.cos(two_pi * ky * delta) + dy

    valid = (qx >= 0.0) & (qx <= w - 1) & (qy >= 0.0) & (qy <= h - 1)
    qxs = np.where(valid, qx, 0.0)
    qys = np.where(valid, qy, 0.0)

    ix = qxs.astype(np.intp)
    iy = qys.astype(np.intp)
    np.clip(ix, 0, max(w - 2, 0), out=ix)
    np.clip(iy, 0, max(h - 2, 0), out=iy)
    fx = qxs - ix
    fy = qys - iy
    ix1 = np.minimum(ix + 1, w - 1)
    iy1 = np.minimum(iy + 1, h - 1)

    top = (1.0 - fx) * tmpl[iy, ix] + fx * tmpl[iy, ix1]
    bot = (1.0 - fx) * tmpl[iy1, ix] + fx * tmpl[iy1, ix1]
    values = np.where(valid, (1.0 - fy) * top + fy * bot, 0.0)
    return values, valid


def _overlap(img_shape, patch_shape, u, v):
    ih, iw = img_shape
    ph, pw = patch_shape
    x_lo = max(0, -u)
    y_lo = max(0, -v)
    x_hi = min(pw, iw - u)
    y_hi = min(ph, ih - v)
    return x_lo, x_hi, y_lo, y_hi


def huber_sum(img, values, valid, u, v, tau):
    x_lo, x_hi, y_lo, y_hi = _overlap(img.shape, values.shape, u, v)
    if x_lo >= x_hi or y_lo >= y_hi:
        return 0.0, 0
    win = img[v + y_lo : v + y_hi, u + x_lo : u + x_hi]
    mask = valid[y_lo:y_hi, x_lo:x_hi]
    r = (win - values[y_lo:y_hi, x_lo:x_hi])[mask]
    s = float(np.sum(np.sqrt(1.0 + (r / tau) ** 2) - 1.0))
    return s, int(r.size)


def ssd_sum(img, values, valid, u, v):
    x_lo, x_hi, y_lo, y_hi = _overlap(img.shape, values.shape, u, v)
    if x_lo >= x_hi or y_lo >= y_hi:
        return 0.0, 0
    win = img[v + y_lo : v + y_hi, u + x_lo : u + x_hi]
    mask = valid[y_lo:y_hi, x_lo:x_hi]
    r = (win - values[y_lo:y_hi, x_lo:x_hi])[mask]
    return float(np.sum(r * r)), int(r.size)
