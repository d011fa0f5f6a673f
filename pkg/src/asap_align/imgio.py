"""PNG frame IO.

All pipeline math runs on single-channel uint8 rasters. Color inputs
are collapsed with the integer BT.601 luma (77R + 150G + 29B) >> 8 so
the conversion is reproducible across platforms and Pillow versions.

A frame sequence on disk is a directory of frame_00000000.png files
plus a manifest.json recording fps, count, width, and height.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
from PIL import Image

from asap_align.errors import SchemaError
from asap_align.model import Frame

MANIFEST_NAME = "manifest.json"


def load_gray(path: str | Path) -> np.ndarray:
    with Image.open(path) as img:
        if img.mode == "L":
            return np.asarray(img, dtype=np.uint8)
        rgb = np.asarray(img.convert("RGB"), dtype=np.uint32)
    luma = (77 * rgb[..., 0] + 150 * rgb[..., 1] + 29 * rgb[..., 2]) >> 8
    return luma.astype(np.uint8)


def save_gray(path: str | Path, pixels: np.ndarray) -> None:
    Image.fromarray(np.ascontiguousarray(pixels), mode="L").save(path, format="PNG")


def frame_name(index: int) -> str:
    return f"frame_{index:08d}.png"


def write_manifest(directory: str | Path, fps: float, count: int, width: int, height: int) -> None:
    payload = {"fps": fps, "count": count, "width": width, "height": height}
    with open(Path(directory) / MANIFEST_NAME, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


class FrameSequence:
    """Lazy reader over a frame directory; frames load on access, one at a time."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        manifest_path = self.directory / MANIFEST_NAME
        if not manifest_path.is_file():
            raise SchemaError(f"no {MANIFEST_NAME} in {self.directory}", path=str(manifest_path))
        try:
            manifest = json.loads(manifest_path.read_text())
            self.fps = float(manifest["fps"])
            self.count = int(manifest["count"])
            self.width = int(manifest["width"])
            self.height = int(manifest["height"])
        except (ValueError, KeyError, TypeError) as exc:
            raise SchemaError(f"bad manifest: {exc}", path=str(manifest_path)) from exc
        if self.fps <= 0 or self.count < 0:
            raise SchemaError("manifest needs fps > 0 and count >= 0", path=str(manifest_path))

    def __len__(self) -> int:
        return self.count

    def pixels(self, index: int) -> np.ndarray:
        if not 0 <= index < self.count:
            raise IndexError(f"frame {index} outside 0..{self.count - 1}")
        return load_gray(self.directory / frame_name(index))

    def frame(self, index: int) -> Frame:
        return Frame.at_fps(index, self.pixels(index), self.fps)

    def iter_frames(self, indices: Iterable[int] | None = None) -> Iterator[Frame]:
        for i in indices if indices is not None else range(self.count):
            yield self.frame(i)
