"""Pixel kernels with a compiled fast path.

The Cython extension `_kern` is preferred when it was built; otherwise
the numpy fallback is used. Setting ASAP_ALIGN_PURE=1 forces the
fallback, which the parity tests and benchmark rely on. Both backends
are bit-identical; only throughput differs.
"""

import os

import numpy as np

from asap_align.errors import DimensionMismatchError
from asap_align.kernels import fallback as _fallback

_backend = None
if not os.environ.get("ASAP_ALIGN_PURE"):
    try:
        from asap_align.kernels import _kern as _backend  # type: ignore[attr-defined]
    except ImportError:
        _backend = None

BACKEND = "cython" if _backend is not None else "numpy"
if _backend is None:
    _backend = _fallback


def _rows(arr: np.ndarray) -> np.ndarray:
    # the compiled kernels want unit-stride rows; ROI crops already are,
    # exotic layouts (transposes, column steps) get copied
    if arr.shape[-1] == 0 or arr.strides[-1] == arr.itemsize:
        return arr
    return np.ascontiguousarray(arr)


def mean_l1(a: np.ndarray, b: np.ndarray) -> float:
    """Mean absolute pixel difference between two equal-shape uint8 rasters."""
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise DimensionMismatchError("empty rasters have no mean distance")
    return _backend.mean_l1(_rows(a), _rows(b))


def window_codes(binary: np.ndarray) -> np.ndarray:
    """35-bit glyph-window signatures of a 0/1 raster; see fallback.window_codes."""
    return _backend.window_codes(_rows(binary))


def area_resize(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Integer box-filter resize of a uint8 raster to (out_h, out_w)."""
    if src.size == 0 or out_h <= 0 or out_w <= 0:
        raise DimensionMismatchError("resize needs non-empty input and positive output shape")
    return _backend.area_resize(_rows(src), out_h, out_w)
