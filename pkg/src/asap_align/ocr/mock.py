"""Template recognizer for frames rendered with the built-in font.

Works by exact signature lookup: binarize, compute the 35-bit code of
every 5x7 window, and keep windows whose code equals some glyph's code.
Matches on one baseline are assembled left to right at the fixed glyph
advance; a window that matches mid-advance can only be an artifact of
two neighboring glyphs whose composite happens to equal a third glyph,
so anything before the expected next position is discarded. A gap of
exactly one advance reads as a space inside the run, the way word gaps
render; wider gaps split runs. One block is emitted per run; a blank
raster yields [].

Optional digit corruption models a noisy OCR service: each digit in the
output is independently swapped for a different digit with probability
`corrupt_digit_p`, drawn from a private RNG so runs stay reproducible
and every recognize() call corrupts independently.
"""

from __future__ import annotations

import random
from collections import defaultdict

import numpy as np

from asap_align import kernels
from asap_align.font import ADVANCE, CODE_TO_CHAR, GLYPH_H, text_width
from asap_align.model import Roi
from asap_align.ocr import TextBlock

_DIGITS = "0123456789"


class TemplateRecognizer:
    def __init__(self, threshold: int = 127, corrupt_digit_p: float = 0.0, seed: int = 0):
        self.threshold = threshold
        self.corrupt_digit_p = corrupt_digit_p
        self._rng = random.Random(seed)

    def recognize(self, image: np.ndarray) -> list[TextBlock]:
        binary = (image > self.threshold).astype(np.uint8)
        codes = kernels.window_codes(binary)
        if codes.size == 0:
            return []
        known = np.isin(codes, np.fromiter(CODE_TO_CHAR, dtype=np.int64, count=len(CODE_TO_CHAR)))
        by_line: dict[int, list[tuple[int, str]]] = defaultdict(list)
        for y, x in np.argwhere(known):
            by_line[int(y)].append((int(x), CODE_TO_CHAR[int(codes[y, x])]))

        blocks = []
        for y in sorted(by_line):
            run_x = 0
            run = ""
            expected = None
            for x, ch in sorted(by_line[y]):
                if expected is not None and x < expected:
                    continue  # glyph-straddling artifact
                if expected is not None and x == expected + ADVANCE:
                    run += " "  # single-advance gap: a space within the run
                elif expected is not None and x > expected:
                    blocks.append(self._block(run, run_x, y))
                    run_x, run = x, ""
                elif expected is None:
                    run_x = x
                run += ch
                expected = x + ADVANCE
            if run:
                blocks.append(self._block(run, run_x, y))
        return blocks

    def _block(self, text: str, x: int, y: int) -> TextBlock:
        if self.corrupt_digit_p > 0.0:
            text = "".join(
                self._rng.choice(_DIGITS.replace(ch, ""))
                if ch in _DIGITS and self._rng.random() < self.corrupt_digit_p
                else ch
                for ch in text
            )
        return TextBlock(text=text, box=Roi(x, y, text_width(text), GLYPH_H))
