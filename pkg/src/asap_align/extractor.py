"""Frame-to-interval extraction.

Every frame's scorecard crop is screened with two mean-L1 thresholds:
against the reference template (occlusion reject) and against the last
accepted crop (dedup skip). Only crops that survive both are queued for
OCR, stacked into composites of stack_capacity crops per recognizer
call. Parsed observations then pass through outlier repair and are
clubbed into state intervals covering the full frame range.

With S state changes over N frames and stack capacity K this costs
ceil((S+1)/K) recognizer calls: the first accepted crop plus one per
change, nothing per unchanged or occluded frame.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from asap_align.errors import StateParseError
from asap_align.kernels import mean_l1
from asap_align.model import Frame, MatchState, Roi, StateInterval, compare_states, format_state, parse_match_state, state_step
from asap_align.ocr import Recognizer
from asap_align.ocr.stacking import destack, stack_crops
from asap_align.profiles import SportProfile

log = logging.getLogger(__name__)

REJECTED = "rejected-occluded"
SKIPPED = "skipped-unchanged"
ACCEPTED = "accepted"

_DEDUP_MODES = ("last-accepted", "consecutive")


@dataclass(frozen=True)
class ExtractionConfig:
    reject_threshold: float = 25.0   # crop vs reference template
    change_threshold: float = 3.0    # crop vs dedup baseline
    stack_capacity: int = 10
    repair_window: int = 25          # frames each side when voting on a suspect
    columns: int = 1
    padding: int = 8
    dedup: str = "last-accepted"     # or "consecutive": baseline is the previous clean frame
    ocr_probes: int = 1              # reads per accepted crop; extras come from the frames
                                     # deduplicated against it, majority-voted per state

    def __post_init__(self) -> None:
        if self.reject_threshold < 0 or self.change_threshold < 0:
            raise ValueError("thresholds must be non-negative")
        if self.change_threshold > self.reject_threshold:
            raise ValueError("change threshold cannot exceed the reject threshold")
        if self.stack_capacity < 1 or self.columns < 1 or self.padding < 0:
            raise ValueError("bad stacking geometry")
        if self.repair_window < 0:
            raise ValueError("repair window must be non-negative")
        if self.dedup not in _DEDUP_MODES:
            raise ValueError(f"dedup must be one of {_DEDUP_MODES}")
        if not 1 <= self.ocr_probes <= self.stack_capacity:
            raise ValueError("ocr_probes must be in [1, stack_capacity]")


@dataclass(frozen=True)
class RawObservation:
    frame_index: int
    verdict: str                     # accepted | skipped-unchanged | rejected-occluded
    state: MatchState | None = None  # set only when verdict == accepted


@dataclass
class _Candidate:
    serial: int
    frame_index: int
    timestamp_ms: int
    crops: list[np.ndarray]          # primary read plus up to ocr_probes-1 confirmers
    texts: list[str] = field(default_factory=list)
    state: MatchState | None = None


@dataclass(frozen=True)
class ExtractionResult:
    intervals: tuple[StateInterval, ...]
    observations: tuple[RawObservation, ...]
    ocr_calls: int
    orphan_blocks: int               # destacked text that landed in no cell
    dropped_frames: tuple[int, ...]  # accepted frames discarded by repair
    demoted_frames: tuple[int, ...]  # accepted frames whose reads never parsed


def _majority_state(candidate: _Candidate, profile: SportProfile) -> MatchState | None:
    """Vote the candidate's reads down to one state; ties go to the earliest read."""
    states: list[MatchState] = []
    for text in candidate.texts:
        if not text:
            continue
        try:
            states.append(parse_match_state(text, profile))
        except StateParseError:
            continue
    if not states:
        return None
    counts = Counter(format_state(s) for s in states)
    top = max(counts.values())
    for state in states:
        if counts[format_state(state)] == top:
            return state
    raise AssertionError("unreachable")


def repair_states(
    parses: Sequence[tuple[int, MatchState]],
    profile: SportProfile,
    window_frames: int = 25,
    fps: float | None = None,
) -> tuple[list[tuple[int, MatchState]], list[int], list[tuple[int, MatchState, MatchState]]]:
    """Repair OCR outliers in (frame_index, state) observations.

    An observation is suspect when it regresses against the previous
    surviving one or jumps past the gradual-step bound (max_step
    deliveries; for clocks, elapsed wall time plus max_step seconds when
    fps is known). Suspects are put to a majority vote over the
    observations within window_frames frames, the suspect included: a
    strict majority state replaces it, anything less drops it. A final
    sweep guarantees the output is non-decreasing.

    Returns (kept, dropped_frames, replacements).
    """
    def bound_for(a: tuple[int, MatchState], b: tuple[int, MatchState]) -> float:
        if profile.state_kind == "over_ball" or fps is None:
            return profile.max_step
        return (b[0] - a[0]) / fps + profile.max_step

    def suspicious(prev: tuple[int, MatchState] | None, cur: tuple[int, MatchState]) -> bool:
        if prev is None:
            return False
        if compare_states(prev[1], cur[1]) > 0:
            return True
        return state_step(prev[1], cur[1]) > bound_for(prev, cur)

    dropped: list[int] = []
    replaced: list[tuple[int, MatchState, MatchState]] = []
    repaired: list[tuple[int, MatchState]] = []
    prev: tuple[int, MatchState] | None = None
    for i, (frame, state) in enumerate(parses):
        if suspicious(prev, (frame, state)):
            window = [s for f, s in parses if abs(f - frame) <= window_frames]
            counts = Counter(format_state(s) for s in window)
            label, votes = counts.most_common(1)[0]
            if votes * 2 > len(window):
                winner = next(s for s in window if format_state(s) == label)
                if format_state(winner) != format_state(state):
                    replaced.append((frame, state, winner))
                    log.info("repair: frame %d %s -> %s", frame, format_state(state), label)
                state = winner
            else:
                dropped.append(frame)
                log.info("repair: dropped frame %d (%s, no majority)", frame, format_state(state))
                continue
        repaired.append((frame, state))
        prev = (frame, state)

    # replacements can themselves break order; sweep until non-decreasing
    kept: list[tuple[int, MatchState]] = []
    for frame, state in repaired:
        if kept and (
            compare_states(kept[-1][1], state) > 0
            or state_step(kept[-1][1], state) > bound_for(kept[-1], (frame, state))
        ):
            dropped.append(frame)
            log.info("repair: dropped frame %d (%s, order sweep)", frame, format_state(state))
            continue
        kept.append((frame, state))
    return kept, dropped, replaced


def extract_intervals(
    frames: Iterable[Frame],
    roi: Roi,
    reference: np.ndarray,
    recognizer: Recognizer,
    config: ExtractionConfig = ExtractionConfig(),
    profile: SportProfile | None = None,
    fps: float | None = None,
) -> ExtractionResult:
    """Run the screen/stack/parse/repair pipeline over a frame stream.

    The intervals partition the covered frame range: each carries the
    state first observed at its opening frame, and occluded or unchanged
    frames inherit the interval they fall inside (frames at a boundary
    go with the earlier interval). Consecutive intervals always differ.
    """
    if profile is None:
        raise ValueError("a sport profile is required to parse states")

    verdicts: list[tuple[int, str]] = []
    candidates: list[_Candidate] = []
    pending: list[tuple[int, np.ndarray]] = []  # (read key, crop), key = serial * probes + probe
    texts: dict[int, str] = {}
    ocr_calls = 0
    orphans = 0
    baseline: np.ndarray | None = None          # dedup comparison crop
    open_candidate: _Candidate | None = None

    def close(candidate: _Candidate | None) -> None:
        if candidate is None:
            return
        base = candidate.serial * config.ocr_probes
        pending.extend((base + i, crop) for i, crop in enumerate(candidate.crops))

    def flush(count: int) -> None:
        nonlocal ocr_calls, orphans
        batch = pending[:count]
        del pending[:count]
        composite, layout = stack_crops(batch, columns=config.columns, padding=config.padding)
        blocks = recognizer.recognize(composite)
        ocr_calls += 1
        read, stray = destack(blocks, layout)
        orphans += stray
        texts.update(read)

    for frame in frames:
        crop = roi.crop(frame.pixels)
        if mean_l1(crop, reference) > config.reject_threshold:
            verdicts.append((frame.index, REJECTED))
            continue
        changed = baseline is None or mean_l1(crop, baseline) > config.change_threshold
        if config.dedup == "consecutive":
            baseline = crop.copy()
        if changed:
            close(open_candidate)
            open_candidate = _Candidate(len(candidates), frame.index, frame.timestamp_ms, [crop.copy()])
            candidates.append(open_candidate)
            if config.dedup == "last-accepted":
                baseline = crop.copy()
            verdicts.append((frame.index, ACCEPTED))
        else:
            if open_candidate is not None and len(open_candidate.crops) < config.ocr_probes:
                open_candidate.crops.append(crop.copy())
            verdicts.append((frame.index, SKIPPED))
        while len(pending) >= config.stack_capacity:
            flush(config.stack_capacity)
    close(open_candidate)
    while len(pending) >= config.stack_capacity:
        flush(config.stack_capacity)
    if pending:
        flush(len(pending))

    demoted: list[int] = []
    parses: list[tuple[int, MatchState]] = []
    for i, cand in enumerate(candidates):
        cand.texts = [texts.get(i * config.ocr_probes + j, "") for j in range(len(cand.crops))]
        cand.state = _majority_state(cand, profile)
        if cand.state is None:
            demoted.append(cand.frame_index)
            log.info("extract: frame %d accepted but unparseable, demoted", cand.frame_index)
        else:
            parses.append((cand.frame_index, cand.state))

    kept, dropped, _ = repair_states(parses, profile, config.repair_window, fps)

    final_state = {frame: state for frame, state in kept}
    observations = tuple(
        RawObservation(frame, ACCEPTED, final_state[frame])
        if verdict == ACCEPTED and frame in final_state
        else RawObservation(frame, SKIPPED if verdict == ACCEPTED else verdict)
        for frame, verdict in verdicts
    )

    intervals: list[StateInterval] = []
    if kept and verdicts:
        last_frame = verdicts[-1][0]
        onsets = []
        for frame, state in kept:
            if onsets and format_state(onsets[-1][1]) == format_state(state):
                continue  # repair can leave equal neighbours; club them
            onsets.append((frame, state))
        first_frame = verdicts[0][0]
        for j, (frame, state) in enumerate(onsets):
            start = first_frame if j == 0 else frame
            end = onsets[j + 1][0] - 1 if j + 1 < len(onsets) else last_frame
            intervals.append(StateInterval(format_state(state), start, end))

    return ExtractionResult(
        intervals=tuple(intervals),
        observations=observations,
        ocr_calls=ocr_calls,
        orphan_blocks=orphans,
        dropped_frames=tuple(dropped),
        demoted_frames=tuple(demoted),
    )


def write_intervals(intervals: Sequence[StateInterval], path: str | Path) -> None:
    """One {"state", "frame_start", "frame_end"} object per line."""
    with open(path, "w") as fh:
        for iv in intervals:
            fh.write(json.dumps(iv.to_dict()) + "\n")


def read_intervals(path: str | Path) -> list[StateInterval]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(StateInterval.from_dict(json.loads(line)))
    return out


def write_observations(observations: Sequence[RawObservation], path: str | Path) -> None:
    """Per-frame verdict audit trail as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame", "verdict", "state"])
        for obs in observations:
            writer.writerow([
                obs.frame_index,
                obs.verdict,
                format_state(obs.state) if obs.state is not None else "",
            ])
