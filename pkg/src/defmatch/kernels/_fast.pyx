# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contract as the numpy backend (see package docs)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sqrt

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925287


def warp(const double[:, ::1] tmpl, double a11, double a12, double a21, double a22,
         double alpha, double beta, double kx, double ky,
         double wcx, double wcy, double dx, double dy):
    cdef Py_ssize_t h = tmpl.shape[0]
    cdef Py_ssize_t w = tmpl.shape[1]
    values_arr = np.zeros((h, w), dtype=np.float64)
    valid_arr = np.zeros((h, w), dtype=np.uint8)
    cdef double[:, ::1] values = values_arr
    cdef unsigned char[:, ::1] valid = valid_arr

    cdef double cx = (w - 1) / 2.0
    cdef double cy = (h - 1) / 2.0
    cdef Py_ssize_t x, y, ix, iy, ix1, iy1
    cdef double xc, yc, ddx, ddy, delta, qx, qy, fx, fy, top, bot

    for y in range(h):
        yc = y - cy
        for x in range(w):
            xc = x - cx
            delta = sqrt((x - wcx) * (x - wcx) + (y - wcy) * (y - wcy))
            qx = a11 * xc + a12 * yc + cx + alpha * cos(TWO_PI * kx * delta) + dx
            qy = a21 * xc + a22 * yc + cy + beta * cos(TWO_PI * ky * delta) + dy
            if qx < 0.0 or qx > w - 1 or qy < 0.0 or qy > h - 1:
                continue
            ix = <Py_ssize_t>qx
            iy = <Py_ssize_t>qy
            if ix > w - 2:
                ix = w - 2 if w >= 2 else 0
            if iy > h - 2:
                iy = h - 2 if h >= 2 else 0
            fx = qx - ix
            fy = qy - iy
            ix1 = ix + 1 if ix + 1 < w else w - 1
            iy1 = iy + 1 if iy + 1 < h else h - 1
            top = (1.0 - fx) * tmpl[iy, ix] + fx * tmpl[iy, ix1]
            bot = (1.0 - fx) * tmpl[iy1, ix] + fx * tmpl[iy1, ix1]
            values[y, x] = (1.0 - fy) * top + fy * bot
            valid[y, x] = 1

    return values_arr, valid_arr.view(np.bool_)


def huber_sum(const double[:, ::1] img, const double[:, ::1] values, valid_in,
              Py_ssize_t u, Py_ssize_t v, double tau):
    cdef const unsigned char[:, ::1] valid = valid_in.view(np.uint8)
    cdef Py_ssize_t ih = img.shape[0]
    cdef Py_ssize_t iw = img.shape[1]
    cdef Py_ssize_t ph = values.shape[0]
    cdef Py_ssize_t pw = values.shape[1]
    cdef Py_ssize_t x_lo = 0 if u >= 0 else -u
    cdef Py_ssize_t y_lo = 0 if v >= 0 else -v
    cdef Py_ssize_t x_hi = pw if pw <= iw - u else iw - u
    cdef Py_ssize_t y_hi = ph if ph <= ih - v else ih - v

    cdef double s = 0.0
    cdef double r
    cdef Py_ssize_t n = 0
    cdef Py_ssize_t x, y
    for y in range(y_lo, y_hi):
        for x in range(x_lo, x_hi):
            if valid[y, x]:
                r = (img[v + y, u + x] - values[y, x]) / tau
                s += sqrt(1.0 + r * r) - 1.0
                n += 1
    return s, n


def ssd_sum(const double[:, ::1] img, const double[:, ::1] values, valid_in,
            Py_ssize_t u, Py_ssize_t v):
    cdef const unsigned char[:, ::1] valid = valid_in.view(np.uint8)
    cdef Py_ssize_t ih = img.shape[0]
    cdef Py_ssize_t iw = img.shape[1]
    cdef Py_ssize_t ph = values.shape[0]
    cdef Py_ssize_t pw = values.shape[1]
    cdef Py_ssize_t x_lo = 0 if u >= 0 else -u
    cdef Py_ssize_t y_lo = 0 if v >= 0 else -v
    cdef Py_ssize_t x_hi = pw if pw <= iw - u else iw - u
    cdef Py_ssize_t y_hi = ph if ph <= ih - v else ih - v

    cdef double s = 0.0
    cdef double r
    cdef Py_ssize_t n = 0
    cdef Py_ssize_t x, y
    for y in range(y_lo, y_hi):
        for x in range(x_lo, x_hi):
            if valid[y, x]:
                r = img[v + y, u + x] - values[y, x]
                s += r * r
                n += 1
    return s, n
