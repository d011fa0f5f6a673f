"""Scorecard ROI discovery.

A handful of uniformly sampled frames go through full-frame OCR; text
boxes that overlap across frames are grouped into candidates, and each
candidate is scored on whether its parsed content advances gradually in
match order. Static banners parse-fail (score 0) and jittery graphics
fail the ordering test, so the surviving box is the scorecard. The
reference template, used downstream to reject occluded frames, is the
candidate crop closest to the element-wise median of its successfully
parsed crops: occluded crops are outliers against that median.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from asap_align import imgio
from asap_align.errors import NoScorecardError, StateParseError
from asap_align.model import Frame, MatchState, Roi, compare_states, format_state, parse_match_state, state_step
from asap_align.ocr import Recognizer
from asap_align.profiles import SportProfile

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 32
DEFAULT_IOU = 0.5
SCORE_FLOOR = 0.6
ROI_MARGIN = 4
REPORT_NAME = "locator_report.json"
REFERENCE_NAME = "reference.png"


def sample_indices(total_frames: int, k: int) -> list[int]:
    """Midpoints of k equal strata: floor(i*total/k) + floor(total/(2k)).

    Strictly increasing; collisions from tiny strata are deduplicated.
    """
    if total_frames <= 0 or k <= 0:
        raise ValueError("need positive frame count and sample count")
    if k > total_frames:
        raise ValueError(f"cannot draw {k} samples from {total_frames} frames")
    offset = total_frames // (2 * k)
    out: list[int] = []
    for i in range(k):
        idx = (i * total_frames) // k + offset
        if not out or idx > out[-1]:
            out.append(idx)
    return out


@dataclass
class _Observation:
    frame_index: int
    timestamp_ms: int
    text: str
    state: MatchState | None  # None = parse failure


@dataclass
class CandidateBox:
    """A text region tracked across sampled frames; box is the running union."""

    box: Roi
    observations: list[_Observation]

    def score(self, profile: SportProfile) -> float:
        """Fraction of consecutive observation pairs that advance gradually.

        A pair counts when both parse, order is non-decreasing, and the
        step stays plausible: at most max_step deliveries for over.ball,
        at most elapsed wall time plus max_step seconds of slack for
        clocks (broadcast clocks pause, so only gross jumps are ruled
        out).
        """
        if len(self.observations) < 2:
            return 0.0
        ok = 0
        pairs = 0
        for a, b in zip(self.observations, self.observations[1:]):
            pairs += 1
            if a.state is None or b.state is None:
                continue
            if compare_states(a.state, b.state) > 0:
                continue
            step = state_step(a.state, b.state)
            if profile.state_kind == "over_ball":
                bound = profile.max_step
            else:
                bound = (b.timestamp_ms - a.timestamp_ms) / 1000 + profile.max_step
            if step <= bound:
                ok += 1
        return ok / pairs


@dataclass(frozen=True)
class LocatorResult:
    roi: Roi
    reference: np.ndarray
    reference_frame: int  # sample the reference crop was taken from
    score: float
    candidates: tuple[dict, ...]  # per-candidate diagnostics, ready for the JSON report


def locate_scorecard(
    frames: Sequence[Frame],
    recognizer: Recognizer,
    profile: SportProfile,
    iou_threshold: float = DEFAULT_IOU,
    score_floor: float = SCORE_FLOOR,
    margin: int = ROI_MARGIN,
) -> LocatorResult:
    """Find the scorecard ROI and its unoccluded reference template.

    `frames` are the sampled frames (see sample_indices), in order.
    Raises NoScorecardError, carrying per-candidate scores, when nothing
    reaches the score floor.
    """
    if len(frames) < 4:
        raise ValueError("need at least 4 sampled frames")
    width, height = frames[0].width, frames[0].height

    candidates: list[CandidateBox] = []
    for frame in frames:
        blocks = sorted(recognizer.recognize(frame.pixels), key=lambda b: (b.box.y, b.box.x))
        for block in blocks:
            try:
                state: MatchState | None = parse_match_state(block.text, profile)
            except StateParseError:
                state = None
            obs = _Observation(frame.index, frame.timestamp_ms, block.text, state)
            for cand in candidates:
                if cand.box.iou(block.box) >= iou_threshold:
                    # one observation per frame per candidate; extras are decor echoes
                    if cand.observations[-1].frame_index != frame.index:
                        cand.box = cand.box.union(block.box)
                        cand.observations.append(obs)
                    break
            else:
                candidates.append(CandidateBox(box=block.box, observations=[obs]))

    scored = [(cand.score(profile), cand) for cand in candidates]
    report = tuple(
        {
            "box": cand.box.to_dict(),
            "score": round(score, 4),
            "n_observations": len(cand.observations),
        }
        for score, cand in scored
    )
    if not scored:
        raise NoScorecardError("no text candidates in sampled frames", scores=list(report))
    # deterministic choice: best score, then most observations, then position
    scored.sort(key=lambda sc: (-sc[0], -len(sc[1].observations), sc[1].box.y, sc[1].box.x))
    best_score, best = scored[0]
    if best_score < score_floor:
        raise NoScorecardError(
            f"best candidate scores {best_score:.3f} < {score_floor}", scores=list(report)
        )

    roi = best.box.expand(margin).clip(width, height)
    by_index = {f.index: f for f in frames}
    good = [obs for obs in best.observations if obs.state is not None]
    crops = [roi.crop(by_index[obs.frame_index].pixels) for obs in good]
    median = np.median(np.stack([c.astype(np.int16) for c in crops]), axis=0)
    dists = [float(np.mean(np.abs(c.astype(np.float64) - median))) for c in crops]
    pick = int(np.argmin(dists))
    log.info(
        "scorecard at %s (score %.3f, %d candidates); reference from frame %d",
        roi, best_score, len(candidates), good[pick].frame_index,
    )
    return LocatorResult(
        roi=roi,
        reference=crops[pick].copy(),
        reference_frame=good[pick].frame_index,
        score=best_score,
        candidates=report,
    )


def write_report(result: LocatorResult, directory: str | Path) -> Path:
    """Write the locator diagnostics JSON plus the reference template PNG."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ref_path = directory / REFERENCE_NAME
    imgio.save_gray(ref_path, result.reference)
    payload = {
        "roi": result.roi.to_dict(),
        "score": round(result.score, 4),
        "reference_frame": result.reference_frame,
        "reference_png": ref_path.name,
        "candidates": list(result.candidates),
    }
    report_path = directory / REPORT_NAME
    with open(report_path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    return report_path


def read_report(directory: str | Path) -> tuple[Roi, np.ndarray]:
    """Load the ROI and reference template written by write_report."""
    directory = Path(directory)
    with open(directory / REPORT_NAME) as fh:
        payload = json.load(fh)
    roi = Roi.from_dict(payload["roi"])
    reference = imgio.load_gray(directory / payload["reference_png"])
    return roi, reference
