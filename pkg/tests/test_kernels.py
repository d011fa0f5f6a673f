"""Kernel oracles plus bit-parity between the compiled and numpy paths."""

import numpy as np
import pytest

from asap_align import kernels
from asap_align.errors import DimensionMismatchError
from asap_align.kernels import fallback


def test_backend_reports_itself():
    assert kernels.BACKEND in ("cython", "numpy")


def test_mean_l1_hand_sum():
    a = np.array([[0, 10], [20, 30]], dtype=np.uint8)
    b = np.array([[10, 10], [10, 40]], dtype=np.uint8)
    # |0-10| + 0 + 10 + 10 = 30 over 4 pixels
    assert kernels.mean_l1(a, b) == pytest.approx(7.5)


def test_mean_l1_extremes():
    a = np.zeros((8, 8), dtype=np.uint8)
    b = np.full((8, 8), 255, dtype=np.uint8)
    assert kernels.mean_l1(a, b) == pytest.approx(255.0)
    assert kernels.mean_l1(a, a) == 0.0


def test_mean_l1_shape_mismatch():
    a = np.zeros((4, 4), dtype=np.uint8)
    b = np.zeros((4, 5), dtype=np.uint8)
    with pytest.raises(DimensionMismatchError):
        kernels.mean_l1(a, b)


def test_mean_l1_accepts_noncontiguous_views():
    rng = np.random.default_rng(0)
    big = rng.integers(0, 256, (64, 64), dtype=np.uint8)
    a = big[10:30, 5:45]
    b = big[30:50, 15:55]
    expected = float(np.mean(np.abs(a.astype(int) - b.astype(int))))
    assert kernels.mean_l1(a, b) == pytest.approx(expected)


def test_window_codes_single_glyph_bit_layout():
    # one lit pixel at (dy, dx) contributes bit dy*5+dx of the window rooted there
    img = np.zeros((7, 5), dtype=np.uint8)
    img[2, 3] = 1
    codes = kernels.window_codes(img)
    assert codes.shape == (1, 1)
    assert codes[0, 0] == 1 << (2 * 5 + 3)


def test_window_codes_too_small_raster():
    assert kernels.window_codes(np.zeros((6, 4), dtype=np.uint8)).size == 0


def test_area_resize_exact_blocks():
    img = np.arange(16, dtype=np.uint8).reshape(4, 4)
    out = kernels.area_resize(img, 2, 2)
    # 2x2 integer means: floor((0+1+4+5)/4) etc.
    assert out.tolist() == [[2, 4], [10, 12]]


def test_area_resize_upscale_degenerate_boxes():
    img = np.array([[10, 200]], dtype=np.uint8)
    out = kernels.area_resize(img, 2, 4)
    assert out.shape == (2, 4)
    # each output cell samples at least one source pixel
    assert set(np.unique(out)) == {10, 200}


@pytest.mark.parametrize("shape,out_shape", [
    ((64, 256), (64, 256)),
    ((120, 160), (128, 128)),
    ((9, 13), (128, 128)),
    ((300, 40), (16, 64)),
])
def test_backend_parity(shape, out_shape):
    if kernels.BACKEND != "cython":
        pytest.skip("compiled backend not built; nothing to compare")
    rng = np.random.default_rng(42)
    a = rng.integers(0, 256, shape, dtype=np.uint8)
    b = rng.integers(0, 256, shape, dtype=np.uint8)
    assert kernels.mean_l1(a, b) == fallback.mean_l1(a, b)
    binary = (a > 127).astype(np.uint8)
    np.testing.assert_array_equal(kernels.window_codes(binary), fallback.window_codes(binary))
    np.testing.assert_array_equal(
        kernels.area_resize(a, *out_shape), fallback.area_resize(a, *out_shape)
    )


def test_fallback_env_override():
    import os
    import subprocess
    import sys

    env = dict(os.environ, ASAP_ALIGN_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import asap_align.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True,
    )
    assert out.stdout.strip() == "numpy"
