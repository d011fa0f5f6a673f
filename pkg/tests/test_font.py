"""Font table invariants.

The recognizer identifies glyphs by exact 35-bit signature, so the table
must be pairwise distinct, and no window that straddles two neighboring
glyphs may alias a third glyph at a position the scanner would accept.
"""

import itertools

import numpy as np
import pytest

from asap_align import font
from asap_align.ocr.mock import TemplateRecognizer

ALL_CHARS = sorted(font._GLYPHS)


def test_glyph_shapes():
    for ch in ALL_CHARS:
        bm = font.glyph_bitmap(ch)
        assert bm.shape == (font.GLYPH_H, font.GLYPH_W)
        assert bm.dtype == np.uint8
        assert set(np.unique(bm)) <= {0, 1}


def test_codes_pairwise_distinct():
    codes = [font.glyph_code(ch) for ch in ALL_CHARS]
    assert len(set(codes)) == len(codes)


def test_code_matches_bitmap():
    for ch in ALL_CHARS:
        bm = font.glyph_bitmap(ch)
        code = 0
        for dy in range(font.GLYPH_H):
            for dx in range(font.GLYPH_W):
                if bm[dy, dx]:
                    code |= 1 << (dy * font.GLYPH_W + dx)
        assert code == font.glyph_code(ch)
        assert font.CODE_TO_CHAR[code] == ch


def test_no_blank_glyph():
    # A blank cell would match every empty window in the image.
    for ch in ALL_CHARS:
        assert font.glyph_code(ch) != 0


def test_lowercase_maps_to_uppercase():
    assert font.glyph_code("q") == font.glyph_code("Q")
    assert np.array_equal(font.glyph_bitmap("z"), font.glyph_bitmap("Z"))


def test_unknown_glyph_raises():
    with pytest.raises(ValueError):
        font.glyph_bitmap("@")
    with pytest.raises(ValueError):
        font.glyph_code("!")


def test_text_width():
    assert font.text_width("") == 0
    assert font.text_width("7") == 5
    assert font.text_width("30.4") == 4 * 6 - 1
    assert font.text_width("Q1 11:59") == 8 * 6 - 1


def test_render_text_bounds_checked():
    canvas = np.zeros((10, 20), dtype=np.uint8)
    with pytest.raises(ValueError):
        font.render_text(canvas, 10, 1, "30")  # 10 + 11 > 20
    with pytest.raises(ValueError):
        font.render_text(canvas, 0, 4, "3")  # 4 + 7 > 10
    with pytest.raises(ValueError):
        font.render_text(canvas, -1, 0, "3")
    font.render_text(canvas, 9, 1, "30")  # exact fit


def test_render_space_leaves_gap_untouched():
    canvas = np.full((11, 40), 9, dtype=np.uint8)
    font.render_text(canvas, 2, 2, "1 1", ink=200)
    gap = canvas[:, 2 + 6:2 + 12]
    assert np.all(gap == 9)
    assert np.count_nonzero(canvas == 200) == 2 * int(font.glyph_bitmap("1").sum())


def test_all_pairs_scan_exact():
    """Every adjacent glyph pair must survive the straddle filter.

    Rendering "ab" creates five straddling windows between the two
    cells; the scanner discards them because they sit before the
    expected advance, but only if the leftmost match in the row is the
    true first glyph. Scanning every ordered pair proves no straddle
    (or partial-glyph window at the edges) outranks a real glyph.
    """
    reco = TemplateRecognizer()
    for a, b in itertools.product(ALL_CHARS, repeat=2):
        text = a + b
        canvas = np.zeros((15, 30), dtype=np.uint8)
        font.render_text(canvas, 4, 3, text, ink=255)
        blocks = reco.recognize(canvas)
        assert [bl.text for bl in blocks] == [text], text
        assert (blocks[0].box.x, blocks[0].box.y) == (4, 3)


def test_no_vertical_shift_aliases():
    """A glyph surrounded by blank margin must scan as exactly itself.

    Windows overlapping the glyph at every vertical offset see partial
    rasters; none may equal another glyph's code (e.g. two stacked dot
    rows in a colon would read as a phantom "." on a nearby baseline).
    """
    reco = TemplateRecognizer()
    for ch in ALL_CHARS:
        canvas = np.zeros((7 + 2 * 8, 5 + 2 * 8), dtype=np.uint8)
        font.render_text(canvas, 8, 8, ch, ink=255)
        blocks = reco.recognize(canvas)
        assert [(bl.text, bl.box.x, bl.box.y) for bl in blocks] == [(ch, 8, 8)], ch


def test_all_pairs_scan_exact_with_margin():
    # same as above but for pairs, with room above and below for
    # phantom baselines to appear if a composite aliases a glyph
    reco = TemplateRecognizer()
    for a, b in itertools.product(ALL_CHARS, repeat=2):
        text = a + b
        canvas = np.zeros((7 + 16, 30), dtype=np.uint8)
        font.render_text(canvas, 4, 8, text, ink=255)
        blocks = reco.recognize(canvas)
        assert [bl.text for bl in blocks] == [text], text


def test_word_gap_reads_as_space():
    canvas = np.zeros((12, 60), dtype=np.uint8)
    font.render_text(canvas, 1, 2, "Q3 07:41", ink=255)
    blocks = TemplateRecognizer().recognize(canvas)
    assert [bl.text for bl in blocks] == ["Q3 07:41"]


def test_two_advance_gap_splits_runs():
    canvas = np.zeros((12, 60), dtype=np.uint8)
    font.render_text(canvas, 1, 2, "12", ink=255)
    font.render_text(canvas, 1 + 2 * font.ADVANCE + font.ADVANCE * 2, 2, "34", ink=255)
    blocks = TemplateRecognizer().recognize(canvas)
    assert [bl.text for bl in blocks] == ["12", "34"]
