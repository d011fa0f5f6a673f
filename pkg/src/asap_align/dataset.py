"""Clip segmentation, match-level splitting, and frame export.

Chains are cut into fixed-size clips of whole overs so every clip is a
self-contained question context; matches are split greedily into
train/val/test by hours so no match leaks across splits; clip frames
are exported masked (scorecard blacked out) and downsampled so models
cannot shortcut through the very scorecard the labels came from.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from asap_align import imgio
from asap_align.aligner import AlignedEvent
from asap_align.errors import InfeasibleSplitError, StateParseError
from asap_align.imgio import FrameSequence
from asap_align.kernels import area_resize
from asap_align.model import OverBall, Roi, parse_match_state
from asap_align.profiles import get_profile

log = logging.getLogger(__name__)

EXPORT_SIZE = 128
SPLIT_NAMES = ("train", "val", "test")
SPLIT_TARGETS = {"train": 0.6, "val": 0.2, "test": 0.2}
MAX_MATCH_SHARE = 0.62


@dataclass(frozen=True)
class Clip:
    over_start: int
    over_end: int           # inclusive
    frame_start: int
    frame_end: int          # inclusive
    events: tuple[AlignedEvent, ...]

    @property
    def tokens(self) -> tuple[str, ...]:
        return tuple(ev.event for ev in self.events)

    def to_dict(self) -> dict:
        return {
            "over_start": self.over_start,
            "over_end": self.over_end,
            "frame_start": self.frame_start,
            "frame_end": self.frame_end,
            "events": [ev.to_dict() for ev in self.events],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Clip":
        return cls(
            over_start=d["over_start"],
            over_end=d["over_end"],
            frame_start=d["frame_start"],
            frame_end=d["frame_end"],
            events=tuple(AlignedEvent.from_dict(e) for e in d["events"]),
        )


def segment_clips(events: Sequence[AlignedEvent], overs_per_clip: int = 10) -> list[Clip]:
    """Cut a cricket chain into clips of overs_per_clip whole overs.

    An over is whole when its last event sits on ball 6 (wides repeat
    the preceding delivery's state, so they never mask the closing
    ball). A trailing partial over and a trailing short group of overs
    are both discarded; the produced clips tile the chain prefix.
    """
    if overs_per_clip < 1:
        raise ValueError("overs_per_clip must be at least 1")
    profile = get_profile("cricket")
    overs: list[list[AlignedEvent]] = []
    for ev in events:
        try:
            state = parse_match_state(ev.state, profile)
        except StateParseError:
            raise ValueError(f"not an over.ball chain: {ev.state!r}") from None
        assert isinstance(state, OverBall)
        if not overs or parse_match_state(overs[-1][-1].state, profile).over != state.over:
            overs.append([])
        overs[-1].append(ev)

    whole = [
        group for group in overs
        if parse_match_state(group[-1].state, profile).ball == 6
    ]
    if len(whole) < len(overs):
        log.info("discarding %d trailing partial over(s)", len(overs) - len(whole))
    clips = []
    for lo in range(0, len(whole) - overs_per_clip + 1, overs_per_clip):
        group = [ev for over in whole[lo:lo + overs_per_clip] for ev in over]
        first = parse_match_state(group[0].state, profile)
        last = parse_match_state(group[-1].state, profile)
        clips.append(Clip(
            over_start=first.over,
            over_end=last.over,
            frame_start=group[0].frame_start,
            frame_end=group[-1].frame_end,
            events=tuple(group),
        ))
    return clips


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    hours: Mapping[str, float]  # per split name

    def to_dict(self) -> dict:
        return {
            "train": list(self.train),
            "val": list(self.val),
            "test": list(self.test),
            "hours": dict(self.hours),
        }


def split_dataset(matches: Sequence[tuple[str, float]], seed: int = 0) -> DatasetSplit:
    """Partition matches into 60:20:20 splits by hours, greedily.

    Matches are ordered longest first (seeded shuffle breaks the ties
    among equal lengths) and each goes to the currently most-deficient
    split, train winning further ties, then val. Raises
    InfeasibleSplitError when one match alone exceeds 62% of total
    hours or fewer than 3 matches are given.
    """
    if len(matches) < 3:
        raise InfeasibleSplitError(f"need at least 3 matches, got {len(matches)}")
    total = sum(h for _, h in matches)
    if total <= 0:
        raise InfeasibleSplitError("total hours must be positive")
    for match_id, hours in matches:
        if hours <= 0:
            raise InfeasibleSplitError(f"match {match_id!r} has non-positive hours")
        if hours > MAX_MATCH_SHARE * total:
            raise InfeasibleSplitError(
                f"match {match_id!r} is {hours / total:.0%} of the corpus; "
                f"no split can stay near 60:20:20 past {MAX_MATCH_SHARE:.0%}"
            )
    order = list(matches)
    random.Random(seed).shuffle(order)
    order.sort(key=lambda m: -m[1])  # stable: equal lengths keep shuffled order

    assigned: dict[str, list[str]] = {name: [] for name in SPLIT_NAMES}
    got: dict[str, float] = {name: 0.0 for name in SPLIT_NAMES}
    for match_id, hours in order:
        # max() keeps the first of equals, so ties go train, then val
        name = max(SPLIT_NAMES, key=lambda n: SPLIT_TARGETS[n] - got[n] / total)
        assigned[name].append(match_id)
        got[name] += hours
    return DatasetSplit(
        train=tuple(assigned["train"]),
        val=tuple(assigned["val"]),
        test=tuple(assigned["test"]),
        hours=got,
    )


def export_clip_frames(
    clip: Clip,
    source: FrameSequence,
    roi: Roi,
    out_dir: str | Path,
    fps_target: float = 0.1,
    size: int = EXPORT_SIZE,
) -> dict:
    """Export the clip's frames masked, subsampled, and resized.

    Frames are taken at floor(i * stride) offsets into the clip where
    stride = source_fps / fps_target; the scorecard ROI is zeroed before
    the area resize to size x size so no label pixels survive. Returns
    the manifest also written to out_dir/manifest.json.
    """
    if fps_target <= 0 or fps_target > source.fps:
        raise ValueError("fps_target must be in (0, source fps]")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stride = source.fps / fps_target
    span = clip.frame_end - clip.frame_start + 1
    count = int((span - 1) // stride) + 1
    records = []
    for i in range(count):
        src_index = clip.frame_start + int(i * stride)
        pixels = source.pixels(src_index).copy()
        pixels[roi.y:roi.y2, roi.x:roi.x2] = 0
        small = area_resize(pixels, size, size)
        name = imgio.frame_name(i)
        imgio.save_gray(out_dir / name, small)
        records.append({"index": i, "source_frame": src_index, "file": name})
    manifest = {
        "fps": fps_target,
        "count": count,
        "width": size,
        "height": size,
        "clip": {
            "over_start": clip.over_start,
            "over_end": clip.over_end,
            "frame_start": clip.frame_start,
            "frame_end": clip.frame_end,
        },
        "frames": records,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def write_clips(clips: Sequence[Clip], path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump({"clips": [c.to_dict() for c in clips]}, fh, indent=2)
        fh.write("\n")


def read_clips(path: str | Path) -> list[Clip]:
    with open(path) as fh:
        payload = json.load(fh)
    return [Clip.from_dict(d) for d in payload["clips"]]
