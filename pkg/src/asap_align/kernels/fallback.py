"""Numpy implementations of the pixel kernels.

Used when the compiled extension is absent (or disabled via
ASAP_ALIGN_PURE=1). Must stay bit-identical to `_kern.pyx`; the parity
tests in tests/test_kernels.py enforce that.
"""

import numpy as np


def mean_l1(a: np.ndarray, b: np.ndarray) -> float:
    # int16 subtraction avoids uint8 wraparound; int64 sum keeps it exact
    total = int(np.abs(np.subtract(a, b, dtype=np.int16)).sum(dtype=np.int64))
    return total / a.size


def window_codes(binary: np.ndarray) -> np.ndarray:
    """35-bit signature of every 5x7 window of a 0/1 raster.

    Bit (dy*5 + dx) is set when the pixel at that window offset is on.
    Output shape is (h-6, w-4); empty when the raster is smaller than a
    glyph cell.
    """
    h, w = binary.shape
    oh, ow = h - 6, w - 4
    if oh <= 0 or ow <= 0:
        return np.zeros((max(oh, 0), max(ow, 0)), dtype=np.int64)
    out = np.zeros((oh, ow), dtype=np.int64)
    bit = 0
    for dy in range(7):
        for dx in range(5):
            np.bitwise_or(out, binary[dy:dy + oh, dx:dx + ow].astype(np.int64) << bit, out=out)
            bit += 1
    return out


def area_resize(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Box-filter resize with floor-spaced integer boundaries.

    Target pixel (i, j) is the floor-divided mean of the source box
    rows [i*h//out_h, (i+1)*h//out_h) by cols [j*w//out_w, (j+1)*w//out_w);
    degenerate boxes (upscaling) are widened to one source pixel. Pure
    integer math, so the output is bit-stable across platforms.
    """
    h, w = src.shape
    ys = (np.arange(out_h + 1, dtype=np.int64) * h) // out_h
    xs = (np.arange(out_w + 1, dtype=np.int64) * w) // out_w
    ys_lo, ys_hi = ys[:-1], np.maximum(ys[1:], ys[:-1] + 1)
    xs_lo, xs_hi = xs[:-1], np.maximum(xs[1:], xs[:-1] + 1)

    integral = np.zeros((h + 1, w + 1), dtype=np.int64)
    integral[1:, 1:] = src.cumsum(axis=0, dtype=np.int64).cumsum(axis=1)
    sums = (
        integral[ys_hi[:, None], xs_hi[None, :]]
        - integral[ys_lo[:, None], xs_hi[None, :]]
        - integral[ys_hi[:, None], xs_lo[None, :]]
        + integral[ys_lo[:, None], xs_lo[None, :]]
    )
    areas = (ys_hi - ys_lo)[:, None] * (xs_hi - xs_lo)[None, :]
    return (sums // areas).astype(np.uint8)
