"""OCR interfaces.

Recognizers take a uint8 grayscale raster and return text blocks. Two
implementations ship: a template matcher for frames rendered with the
built-in font (ocr.mock) and a client for a remote OCR service
(ocr.remote). The pipeline only sees the protocol, so they swap freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from asap_align.model import Roi


@dataclass(frozen=True)
class TextBlock:
    """One recognized string and its bounding box in the submitted image."""

    text: str
    box: Roi

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("empty text block")

    @property
    def center_x(self) -> float:
        return self.box.x + self.box.w / 2

    @property
    def center_y(self) -> float:
        return self.box.y + self.box.h / 2


@runtime_checkable
class Recognizer(Protocol):
    def recognize(self, image: np.ndarray) -> list[TextBlock]: ...


class CountingRecognizer:
    """Wrapper that counts recognize() calls; the call-economy tests budget against it."""

    def __init__(self, inner: Recognizer):
        self.inner = inner
        self.n_calls = 0

    def recognize(self, image: np.ndarray) -> list[TextBlock]:
        self.n_calls += 1
        return self.inner.recognize(image)
