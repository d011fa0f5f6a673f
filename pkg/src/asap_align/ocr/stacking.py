"""Batching scorecard crops into one OCR call.

OCR is priced per request, not per pixel, so many crops are composited
into a single image and recognized together. Slots are laid out
row-major on a grid (default a single column, the conservative reading
of "stack"); each cell is padded to the largest crop and followed by a
blank gutter. Destacking routes every returned block back to the slot
containing its box center; blocks whose center lands in a gutter or in
an unfilled cell belong to nothing and are counted as orphans rather
than guessed at.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from asap_align.ocr import TextBlock

DEFAULT_PADDING = 8


@dataclass(frozen=True)
class StackLayout:
    cell_w: int
    cell_h: int
    columns: int
    rows: int
    padding: int
    entries: tuple[tuple[int, int], ...]  # (slot, caller's source index)

    @property
    def pitch_x(self) -> int:
        return self.cell_w + self.padding

    @property
    def pitch_y(self) -> int:
        return self.cell_h + self.padding

    def slot_origin(self, slot: int) -> tuple[int, int]:
        row, col = divmod(slot, self.columns)
        return col * self.pitch_x, row * self.pitch_y

    def slot_at(self, x: float, y: float) -> int | None:
        """Slot whose crop area contains (x, y), else None (gutter or outside)."""
        if x < 0 or y < 0:
            return None
        col, within_x = divmod(x, self.pitch_x)
        row, within_y = divmod(y, self.pitch_y)
        if col >= self.columns or row >= self.rows:
            return None
        if within_x >= self.cell_w or within_y >= self.cell_h:
            return None
        return int(row) * self.columns + int(col)


def stack_crops(
    crops: Sequence[tuple[int, np.ndarray]], columns: int = 1, padding: int = DEFAULT_PADDING
) -> tuple[np.ndarray, StackLayout]:
    """Composite (source index, raster) pairs into one image, row-major.

    Crops smaller than the largest one are zero-padded at their cell's
    top-left corner, so block coordinates stay valid per crop.
    """
    if not crops:
        raise ValueError("nothing to stack")
    if columns < 1:
        raise ValueError("columns must be positive")
    cell_h = max(c.shape[0] for _, c in crops)
    cell_w = max(c.shape[1] for _, c in crops)
    rows = -(-len(crops) // columns)
    layout = StackLayout(
        cell_w=cell_w,
        cell_h=cell_h,
        columns=columns,
        rows=rows,
        padding=padding,
        entries=tuple((slot, src) for slot, (src, _) in enumerate(crops)),
    )
    image = np.zeros((rows * layout.pitch_y, columns * layout.pitch_x), dtype=np.uint8)
    for slot, (_, crop) in enumerate(crops):
        ox, oy = layout.slot_origin(slot)
        image[oy:oy + crop.shape[0], ox:ox + crop.shape[1]] = crop
    return image, layout


def destack(blocks: Sequence[TextBlock], layout: StackLayout) -> tuple[dict[int, str], int]:
    """Map stacked-image blocks back to per-source texts.

    Blocks routed to one slot concatenate in reading order (top to
    bottom, left to right by box origin) with single spaces. Returns
    {source index: text} with "" for slots nothing was read from, plus
    the count of orphaned blocks.
    """
    per_slot: dict[int, list[TextBlock]] = {}
    filled = {slot for slot, _ in layout.entries}
    orphans = 0
    for block in blocks:
        slot = layout.slot_at(block.center_x, block.center_y)
        if slot is None or slot not in filled:
            orphans += 1
            continue
        per_slot.setdefault(slot, []).append(block)
    texts: dict[int, str] = {}
    for slot, src in layout.entries:
        slot_blocks = sorted(per_slot.get(slot, []), key=lambda b: (b.box.y, b.box.x))
        texts[src] = " ".join(b.text for b in slot_blocks)
    return texts, orphans
