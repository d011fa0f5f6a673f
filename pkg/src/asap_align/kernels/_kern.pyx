# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled raster kernels.

Parameters are generic strided 2D memoryviews so that row/column crops of a
larger frame can be passed without copying.  Inner loops walk raw row
pointers, which is valid because the Python-side wrapper normalizes every
input to unit-stride rows before dispatching here (ROI crops already are;
transposes and column-stepped views get copied).
"""

import numpy as np


def mean_l1(const unsigned char[:, :] a, const unsigned char[:, :] b):
    if a.shape[0] != b.shape[0] or a.shape[1] != b.shape[1]:
        raise ValueError("shape mismatch")
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    if h == 0 or w == 0:
        return 0.0
    cdef const unsigned char* pa
    cdef const unsigned char* pb
    cdef long long total = 0
    cdef int d
    cdef Py_ssize_t x, y
    for y in range(h):
        pa = &a[y, 0]
        pb = &b[y, 0]
        for x in range(w):
            d = pa[x] - pb[x]
            total += d if d >= 0 else -d
    return total / <double>(h * w)


def window_codes(const unsigned char[:, :] binary):
    cdef Py_ssize_t h = binary.shape[0]
    cdef Py_ssize_t w = binary.shape[1]
    cdef Py_ssize_t oh = h - 6
    cdef Py_ssize_t ow = w - 4
    out = np.zeros((max(oh, 0), max(ow, 0)), dtype=np.int64)
    if oh <= 0 or ow <= 0:
        return out
    cdef long long[:, ::1] o = out
    cdef const unsigned char* rows[7]
    cdef Py_ssize_t x, y, k, dx
    cdef long long code, clear
    # rolling update: stepping the window right shifts every bit down by
    # one, which smears each row's old dx=0 bit into the row above's dx=4
    # slot; those slots are cleared before the fresh column comes in
    clear = 0
    for k in range(7):
        clear |= <long long>1 << (k * 5 + 4)
    clear = ~clear
    for y in range(oh):
        for k in range(7):
            rows[k] = &binary[y + k, 0]
        code = 0
        for k in range(7):
            for dx in range(5):
                if rows[k][dx] != 0:
                    code |= <long long>1 << (k * 5 + dx)
        o[y, 0] = code
        for x in range(1, ow):
            code = (code >> 1) & clear
            for k in range(7):
                if rows[k][x + 4] != 0:
                    code |= <long long>1 << (k * 5 + 4)
            o[y, x] = code
    return out


def area_resize(const unsigned char[:, :] src, Py_ssize_t out_h, Py_ssize_t out_w):
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    if h == 0 or w == 0 or out_h <= 0 or out_w <= 0:
        raise ValueError("empty raster")
    out = np.empty((out_h, out_w), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef const unsigned char* row
    cdef Py_ssize_t i, j, y, x, y0, y1, x0, x1
    cdef long long total, area
    for i in range(out_h):
        y0 = (i * h) // out_h
        y1 = ((i + 1) * h) // out_h
        if y1 <= y0:
            y1 = y0 + 1
        for j in range(out_w):
            x0 = (j * w) // out_w
            x1 = ((j + 1) * w) // out_w
            if x1 <= x0:
                x1 = x0 + 1
            total = 0
            for y in range(y0, y1):
                row = &src[y, 0]
                for x in range(x0, x1):
                    total += row[x]
            area = (y1 - y0) * (x1 - x0)
            o[i, j] = <unsigned char>(total // area)
    return out
