import itertools
import json

import numpy as np
import pytest

from asap_align import imgio
from asap_align.aligner import AlignedEvent
from asap_align.dataset import (
    Clip,
    export_clip_frames,
    read_clips,
    segment_clips,
    split_dataset,
    write_clips,
)
from asap_align.errors import InfeasibleSplitError
from asap_align.imgio import FrameSequence
from asap_align.model import Roi


def mk_chain(n_overs, wides_at=(), start_over=0, frames_per_event=10, fps=5.0):
    """Contiguous cricket chain; wides_at lists (over, ball) keys that get
    a wide before the legal delivery on the same state."""
    events = []
    frame = 0

    def push(state, token):
        nonlocal frame
        start, end = frame, frame + frames_per_event - 1
        events.append(AlignedEvent(
            event=token, state=state, frame_start=start, frame_end=end,
            t_start_ms=round(start * 1000 / fps),
            t_end_ms=round((end + 1) * 1000 / fps),
        ))
        frame = end + 1

    for over in range(start_over, start_over + n_overs):
        for ball in range(1, 7):
            state = f"{over}.{ball}"
            if (over, ball) in wides_at:
                push(state, "w")
            push(state, str((over + ball) % 7))
    return events


# --- segmentation ----------------------------------------------------------

def test_two_clips_tile_twenty_overs():
    chain = mk_chain(20)
    clips = segment_clips(chain, overs_per_clip=10)
    assert [(c.over_start, c.over_end) for c in clips] == [(0, 9), (10, 19)]
    assert clips[0].frame_start == 0
    assert clips[1].frame_start == clips[0].frame_end + 1
    assert clips[1].frame_end == chain[-1].frame_end
    assert len(clips[0].events) == len(clips[1].events) == 60


def test_trailing_partial_over_dropped():
    chain = mk_chain(10) + mk_chain(1, start_over=10)[:3]
    clips = segment_clips(chain, overs_per_clip=10)
    assert len(clips) == 1
    assert clips[0].over_end == 9
    assert all("10." not in ev.state for ev in clips[0].events)


def test_trailing_short_group_dropped():
    clips = segment_clips(mk_chain(13), overs_per_clip=10)
    assert [(c.over_start, c.over_end) for c in clips] == [(0, 9)]
    clips5 = segment_clips(mk_chain(13), overs_per_clip=5)
    assert [(c.over_start, c.over_end) for c in clips5] == [(0, 4), (5, 9)]


def test_wides_ride_along():
    chain = mk_chain(10, wides_at={(2, 4), (7, 1), (7, 6)})
    (clip,) = segment_clips(chain, overs_per_clip=10)
    assert len(clip.events) == 63
    assert clip.tokens.count("w") == 3
    # the wide precedes its re-delivery on the same state
    idx = clip.tokens.index("w")
    assert clip.events[idx].state == clip.events[idx + 1].state == "2.4"


def test_single_over_clips():
    clips = segment_clips(mk_chain(3), overs_per_clip=1)
    assert [(c.over_start, c.over_end) for c in clips] == [(0, 0), (1, 1), (2, 2)]
    assert clips[1].tokens == tuple(str((1 + b) % 7) for b in range(1, 7))


def test_non_cricket_chain_rejected():
    ev = AlignedEvent("goal", "14:02", 0, 9, 0, 2000)
    with pytest.raises(ValueError):
        segment_clips([ev])


def test_bad_overs_per_clip():
    with pytest.raises(ValueError):
        segment_clips(mk_chain(1), overs_per_clip=0)


def test_clips_file_round_trip(tmp_path):
    clips = segment_clips(mk_chain(20), overs_per_clip=10)
    path = tmp_path / "clips.json"
    write_clips(clips, path)
    assert read_clips(path) == clips


# --- splitting ----------------------------------------------------------------

def test_twenty_equal_matches_within_tolerance():
    matches = [(f"m{i:02d}", 1.0) for i in range(20)]
    split = split_dataset(matches, seed=0)
    assert (len(split.train), len(split.val), len(split.test)) == (12, 4, 4)
    total = sum(h for _, h in matches)
    for name, target in (("train", 0.6), ("val", 0.2), ("test", 0.2)):
        assert abs(split.hours[name] / total - target) <= 0.02
    all_ids = sorted(split.train + split.val + split.test)
    assert all_ids == sorted(m for m, _ in matches)


def test_split_deterministic_and_seed_sensitive():
    matches = [(f"m{i}", 1.0) for i in range(20)]
    a = split_dataset(matches, seed=7)
    b = split_dataset(matches, seed=7)
    assert a == b
    memberships = {tuple(split_dataset(matches, seed=s).train) for s in range(6)}
    assert len(memberships) > 1  # the shuffle actually varies membership
    for s in range(6):
        again = split_dataset(matches, seed=s)
        assert (len(again.train), len(again.val), len(again.test)) == (12, 4, 4)


def test_five_three_two():
    split = split_dataset([("a", 5.0), ("b", 3.0), ("c", 2.0)], seed=0)
    assert split.train == ("a",)
    assert split.val == ("b",)
    assert split.test == ("c",)
    assert split.hours == {"train": 5.0, "val": 3.0, "test": 2.0}


def test_greedy_matches_brute_force_on_small_corpora():
    """For every corpus of <= 6 matches, the greedy split's worst share
    deviation equals the exhaustive optimum (each split non-empty)."""
    corpora = [
        [5.0, 3.0, 2.0],
        [1.0, 1.0, 1.0, 1.0, 1.0],
        [4.0, 2.0, 2.0, 1.0, 1.0],
        [3.0, 3.0, 2.0, 1.0, 0.5, 0.5],
    ]
    targets = (0.6, 0.2, 0.2)
    for hours in corpora:
        total = sum(hours)
        best = None
        for assign in itertools.product(range(3), repeat=len(hours)):
            if len(set(assign)) < 3:
                continue
            shares = [sum(h for h, a in zip(hours, assign) if a == k) / total
                      for k in range(3)]
            dev = max(abs(s - t) for s, t in zip(shares, targets))
            best = dev if best is None else min(best, dev)
        split = split_dataset([(f"m{i}", h) for i, h in enumerate(hours)], seed=0)
        got = max(
            abs(split.hours[name] / total - target)
            for name, target in (("train", 0.6), ("val", 0.2), ("test", 0.2))
        )
        assert got <= best + 1e-9, (hours, got, best)


def test_split_infeasible_cases():
    with pytest.raises(InfeasibleSplitError):
        split_dataset([("a", 1.0), ("b", 1.0)])
    with pytest.raises(InfeasibleSplitError):
        split_dataset([("a", 1.0), ("b", 0.0), ("c", 1.0)])
    with pytest.raises(InfeasibleSplitError):
        split_dataset([("a", 7.0), ("b", 2.0), ("c", 1.0)])  # 70% in one match


# --- export ---------------------------------------------------------------------

@pytest.fixture
def source_sequence(tmp_path):
    # 32x32 gray 100 with a bright top-half "scorecard" band
    directory = tmp_path / "frames"
    directory.mkdir()
    count = 100
    for i in range(count):
        px = np.full((32, 32), 100, dtype=np.uint8)
        px[0:16, :] = 250
        px[20, 5] = 150 + (i % 100)  # make frames distinguishable
        imgio.save_gray(directory / imgio.frame_name(i), px)
    imgio.write_manifest(directory, fps=5.0, count=count, width=32, height=32)
    return FrameSequence(directory)


def _clip_for(span):
    ev = AlignedEvent("1", "0.1", 0, span - 1, 0, span * 200)
    return Clip(over_start=0, over_end=9, frame_start=0, frame_end=span - 1, events=(ev,))


def test_export_strides_and_manifest(tmp_path, source_sequence):
    clip = _clip_for(100)
    roi = Roi(0, 0, 32, 16)
    out = tmp_path / "export"
    manifest = export_clip_frames(clip, source_sequence, roi, out, fps_target=0.5, size=16)
    assert manifest["count"] == 10
    assert [r["source_frame"] for r in manifest["frames"]] == list(range(0, 100, 10))
    on_disk = json.loads((out / "manifest.json").read_text())
    assert on_disk == manifest
    files = sorted(p.name for p in out.glob("frame_*.png"))
    assert files == [imgio.frame_name(i) for i in range(10)]


def test_export_slower_rate(tmp_path, source_sequence):
    manifest = export_clip_frames(_clip_for(100), source_sequence, Roi(0, 0, 32, 16),
                                  tmp_path / "e2", fps_target=0.1, size=16)
    assert manifest["count"] == 2
    assert [r["source_frame"] for r in manifest["frames"]] == [0, 50]


def test_export_masks_roi_before_resize(tmp_path, source_sequence):
    out = tmp_path / "e3"
    export_clip_frames(_clip_for(100), source_sequence, Roi(0, 0, 32, 16),
                       out, fps_target=0.5, size=16)
    img = imgio.load_gray(out / imgio.frame_name(0))
    assert img.shape == (16, 16)
    assert np.all(img[0:8, :] == 0)  # masked band resizes to exact zeros
    assert np.all(img[8:, :] >= 99)  # untouched region survives


def test_export_rejects_bad_rate(tmp_path, source_sequence):
    with pytest.raises(ValueError):
        export_clip_frames(_clip_for(10), source_sequence, Roi(0, 0, 8, 8),
                           tmp_path / "e4", fps_target=0.0)
    with pytest.raises(ValueError):
        export_clip_frames(_clip_for(10), source_sequence, Roi(0, 0, 8, 8),
                           tmp_path / "e5", fps_target=10.0)


def test_export_short_clip_single_frame(tmp_path, source_sequence):
    manifest = export_clip_frames(_clip_for(30), source_sequence, Roi(0, 0, 32, 16),
                                  tmp_path / "e6", fps_target=0.1, size=16)
    assert manifest["count"] == 1
    assert manifest["frames"][0]["source_frame"] == 0
