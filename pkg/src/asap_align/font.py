"""Fixed 5x7 bitmap font shared by the frame renderer and the mock OCR.

Every glyph occupies a 5-wide, 7-tall cell; consecutive glyphs are
separated by one blank column, so the horizontal advance is 6. The mock
recognizer identifies glyphs by the exact 35-bit signature of their
cell (bit dy*5+dx set when that pixel is inked), which is why the
patterns below must be pairwise distinct and why renderer and
recognizer must share this table.
"""

import numpy as np

GLYPH_H = 7
GLYPH_W = 5
ADVANCE = GLYPH_W + 1

_GLYPHS = {
    "0": (".###.", "#...#", "#..##", "#.#.#", "##..#", "#...#", ".###."),
    "1": ("..#..", ".##..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "2": (".###.", "#...#", "....#", "...#.", "..#..", ".#...", "#####"),
    "3": ("#####", "...#.", "..#..", "...#.", "....#", "#...#", ".###."),
    "4": ("...#.", "..##.", ".#.#.", "#..#.", "#####", "...#.", "...#."),
    "5": ("#####", "#....", "####.", "....#", "....#", "#...#", ".###."),
    "6": ("..##.", ".#...", "#....", "####.", "#...#", "#...#", ".###."),
    "7": ("#####", "....#", "...#.", "..#..", ".#...", ".#...", ".#..."),
    "8": (".###.", "#...#", "#...#", ".###.", "#...#", "#...#", ".###."),
    "9": (".###.", "#...#", "#...#", ".####", "....#", "...#.", ".##.."),
    ".": (".....", ".....", ".....", ".....", ".....", ".##..", ".##.."),
    # single-row dots: two stacked rows would alias "." inside a shifted window
    ":": (".....", ".....", ".##..", ".....", ".##..", ".....", "....."),
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "##.##", "#...#"),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}


def _compile() -> tuple[dict[str, np.ndarray], dict[str, int], dict[int, str]]:
    bitmaps: dict[str, np.ndarray] = {}
    codes: dict[str, int] = {}
    chars: dict[int, str] = {}
    for ch, rows in _GLYPHS.items():
        bm = np.array([[1 if c == "#" else 0 for c in row] for row in rows], dtype=np.uint8)
        code = 0
        for dy in range(GLYPH_H):
            for dx in range(GLYPH_W):
                if bm[dy, dx]:
                    code |= 1 << (dy * GLYPH_W + dx)
        bitmaps[ch] = bm
        codes[ch] = code
        chars[code] = ch
    return bitmaps, codes, chars


_BITMAPS, _CODES, CODE_TO_CHAR = _compile()


def glyph_bitmap(ch: str) -> np.ndarray:
    """0/1 uint8 raster of shape (7, 5) for one glyph. Letters are uppercased."""
    try:
        return _BITMAPS[ch.upper()]
    except KeyError:
        raise ValueError(f"no glyph for {ch!r}") from None


def glyph_code(ch: str) -> int:
    try:
        return _CODES[ch.upper()]
    except KeyError:
        raise ValueError(f"no glyph for {ch!r}") from None


def text_width(text: str) -> int:
    """Pixel width of rendered text; the trailing spacing column is not counted."""
    return len(text) * ADVANCE - 1 if text else 0


def render_text(canvas: np.ndarray, x: int, y: int, text: str, ink: int = 255) -> None:
    """Stamp `text` onto a uint8 canvas with its top-left cell at (x, y).

    Spaces advance the pen without inking. Raises ValueError when the
    text would fall outside the canvas, since silent clipping would make
    renderer and recognizer disagree.
    """
    if not text:
        return
    h, w = canvas.shape
    if y < 0 or x < 0 or y + GLYPH_H > h or x + text_width(text) > w:
        raise ValueError(f"text {text!r} at ({x}, {y}) exceeds canvas {w}x{h}")
    pen = x
    for ch in text:
        if ch != " ":
            bm = glyph_bitmap(ch)
            cell = canvas[y:y + GLYPH_H, pen:pen + GLYPH_W]
            cell[bm == 1] = ink
        pen += ADVANCE
