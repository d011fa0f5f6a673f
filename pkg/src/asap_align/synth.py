"""Synthetic broadcast generator.

Renders a deterministic grayscale broadcast per scenario: a static
seeded background texture, a dark scorecard panel with a decor tag and
the match state in the built-in font, optional per-frame jitter, and
scheduled occlusions that replace the panel with a solid card, noise,
or an ad overlay. Because the schedule is the ground truth, every run
also emits the true intervals, the true event chain, and the matching
commentary document, which is what makes end-to-end accuracy measurable
without human labels.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from asap_align import font, imgio
from asap_align.aligner import AlignedEvent, write_chain
from asap_align.extractor import write_intervals
from asap_align.locator import ROI_MARGIN
from asap_align.model import Frame, Roi, StateInterval, format_state, parse_match_state, state_successor
from asap_align.profiles import SportProfile, get_profile

log = logging.getLogger(__name__)

PANEL_FILL = 30
# ink-to-panel contrast of 170 keeps a many-over state drift against the
# reference template under the occlusion threshold while occlusions, at
# full panel replacement, stay an order of magnitude above it
STATE_INK = 200
DECOR_INK = 200
OCCLUSION_STYLES = ("panel", "noise", "adtext")
_AD_TEXT = "SALE"

# commentary one-liners per cricket token; texts stay keyword-free so
# the explicit flags remain the only event signal
_CRICKET_TEXTS = {
    "0": "defended off the back foot",
    "1": "worked away for a single",
    "2": "placed into the gap, two",
    "3": "hard running, three",
    "4": "driven past cover to the rope",
    "5": "misfield and overthrows, five",
    "6": "launched over long-on",
    "7": "scrambled seven, rare chaos",
    "8": "boundary plus overthrows, eight",
    "9": "nine off the one ball",
    "o": "cleaned him up, gone",
    "w": "called down the leg side",
}


@dataclass(frozen=True)
class ScriptStep:
    """One displayed state: how long it stays up and what, if anything, happened."""

    state: str
    frames: int
    event: str | None = None
    text: str = ""

    def __post_init__(self) -> None:
        if self.frames < 1:
            raise ValueError("steps need at least one frame")
        if not self.state:
            raise ValueError("steps need a state")


@dataclass(frozen=True)
class Scenario:
    sport: str
    match_id: str
    seed: int
    steps: tuple[ScriptStep, ...]
    fps: float = 5.0
    width: int = 160
    height: int = 120
    panel: Roi = Roi(8, 96, 88, 17)
    occlusions: tuple[tuple[int, int, str], ...] = ()  # (first, last frame, style)
    noise_amplitude: int = 8
    jitter: int = 0
    decor: str = "IND"

    def __post_init__(self) -> None:
        if not self.steps:
            raise ValueError("a scenario needs steps")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if not 0 <= self.noise_amplitude <= 20 or not 0 <= self.jitter <= 20:
            raise ValueError("texture bands past 20 bleed into the binarize threshold")
        if self.panel.x2 > self.width or self.panel.y2 > self.height:
            raise ValueError("panel leaves the frame")
        total = self.total_frames
        for lo, hi, style in self.occlusions:
            if style not in OCCLUSION_STYLES:
                raise ValueError(f"unknown occlusion style {style!r}")
            if not 0 <= lo <= hi < total:
                raise ValueError(f"occlusion [{lo}, {hi}] outside 0..{total - 1}")

    @property
    def total_frames(self) -> int:
        return sum(s.frames for s in self.steps)

    @property
    def profile(self) -> SportProfile:
        return get_profile(self.sport)

    def state_origin(self) -> tuple[int, int]:
        """Top-left of the rendered state text, right of the decor tag."""
        x = self.panel.x + 4
        if self.decor:
            x += font.text_width(self.decor) + 12  # decor stays clear of the state
        return x, self.panel.y + 5

    def expected_roi(self, margin: int = ROI_MARGIN) -> Roi:
        """Union of every rendered state's text box, padded like the locator pads."""
        x, y = self.state_origin()
        w = max(font.text_width(s.state) for s in self.steps)
        return Roi(x, y, w, font.GLYPH_H).expand(margin).clip(self.width, self.height)

    def to_dict(self) -> dict:
        return {
            "sport": self.sport,
            "match_id": self.match_id,
            "seed": self.seed,
            "fps": self.fps,
            "width": self.width,
            "height": self.height,
            "panel": self.panel.to_dict(),
            "steps": [
                {k: v for k, v in dataclasses.asdict(s).items() if v not in (None, "")}
                for s in self.steps
            ],
            "occlusions": [list(o) for o in self.occlusions],
            "noise_amplitude": self.noise_amplitude,
            "jitter": self.jitter,
            "decor": self.decor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(
            sport=d["sport"],
            match_id=d["match_id"],
            seed=d["seed"],
            steps=tuple(
                ScriptStep(
                    state=s["state"],
                    frames=s["frames"],
                    event=s.get("event"),
                    text=s.get("text", ""),
                )
                for s in d["steps"]
            ),
            fps=d.get("fps", 5.0),
            width=d.get("width", 160),
            height=d.get("height", 120),
            panel=Roi.from_dict(d["panel"]) if "panel" in d else Roi(8, 96, 88, 17),
            occlusions=tuple((o[0], o[1], o[2]) for o in d.get("occlusions", ())),
            noise_amplitude=d.get("noise_amplitude", 8),
            jitter=d.get("jitter", 0),
            decor=d.get("decor", "IND"),
        )


def cricket_steps(
    tokens: Sequence[str],
    start_over: int = 10,
    frames_range: tuple[int, int] = (8, 20),
    seed: int = 0,
) -> tuple[ScriptStep, ...]:
    """Turn a delivery token stream into scripted states.

    The card shows the delivery in progress, so a legal delivery (digit
    or "o") advances it afterwards while a wide leaves it put: the wide
    and its re-delivery share a key, wide first, which is exactly the
    duplicate-key situation downstream must survive.
    """
    rng = random.Random(seed)
    over, ball = start_over, 1
    steps = []
    for token in tokens:
        if token not in _CRICKET_TEXTS:
            raise ValueError(f"unknown delivery token {token!r}")
        steps.append(ScriptStep(
            state=f"{over}.{ball}",
            frames=rng.randint(*frames_range),
            event=token,
            text=_CRICKET_TEXTS[token],
        ))
        if token != "w":
            ball += 1
            if ball > 6:
                over += 1
                ball = 1
    return tuple(steps)


def sample_tokens(
    n_events: int, seed: int, wide_rate: float = 0.05, wicket_rate: float = 0.05
) -> list[str]:
    """A plausible delivery mix; never opens with a wide."""
    rng = random.Random(seed)
    runs = ["0", "1", "2", "3", "4", "6"]
    weights = [30, 30, 12, 4, 16, 8]
    out = []
    for i in range(n_events):
        r = rng.random()
        if i > 0 and r < wide_rate:
            out.append("w")
        elif r < wide_rate + wicket_rate:
            out.append("o")
        else:
            out.append(rng.choices(runs, weights)[0])
    return out


def clock_steps(
    start: str,
    sport: str,
    ticks: int,
    frames_per_tick: int = 5,
    events: Mapping[int, tuple[str, str]] | None = None,
) -> tuple[ScriptStep, ...]:
    """Script every displayed clock tick; events land sparsely on ticks.

    events maps tick index to (event label, commentary text); the label
    is ground truth, the text is what the classifier will see.
    """
    profile = get_profile(sport)
    state = parse_match_state(start, profile)
    events = events or {}
    steps = []
    for i in range(ticks):
        label, text = events.get(i, (None, ""))
        steps.append(ScriptStep(
            state=format_state(state),
            frames=frames_per_tick,
            event=label,
            text=text,
        ))
        state = state_successor(state)
    return tuple(steps)


def interior_occlusions(
    scenario_steps: Sequence[ScriptStep],
    fraction: float,
    seed: int,
    style: str = "panel",
    min_edge: int = 2,
) -> tuple[tuple[int, int, str], ...]:
    """Schedule occlusions inside step interiors, away from state flips.

    Keeps at least min_edge clean frames on each side of every state
    boundary so the extractor can still pin each onset exactly; the
    total occluded frames approach fraction * total from below.
    """
    if not 0 <= fraction < 1:
        raise ValueError("fraction must be in [0, 1)")
    rng = random.Random(seed)
    spans = []
    start = 0
    for step in scenario_steps:
        spans.append((start, start + step.frames - 1))
        start += step.frames
    total = start
    budget = int(fraction * total)
    eligible = [(lo, hi) for lo, hi in spans if hi - lo + 1 > 2 * min_edge]
    rng.shuffle(eligible)
    chunks = []
    for lo, hi in eligible:
        if budget <= 0:
            break
        room = (hi - lo + 1) - 2 * min_edge
        length = min(room, budget)
        first = rng.randint(lo + min_edge, hi - min_edge - length + 1)
        chunks.append((first, first + length - 1, style))
        budget -= length
    return tuple(sorted(chunks))


def _texture(scenario: Scenario) -> np.ndarray:
    rng = np.random.default_rng(scenario.seed)
    lo = 90 - scenario.noise_amplitude
    hi = 90 + scenario.noise_amplitude
    return rng.integers(lo, hi + 1, size=(scenario.height, scenario.width)).astype(np.uint8)


def _frame_states(scenario: Scenario) -> list[str]:
    out = []
    for step in scenario.steps:
        out.extend([step.state] * step.frames)
    return out


def _occlusion_at(scenario: Scenario, index: int) -> str | None:
    for lo, hi, style in scenario.occlusions:
        if lo <= index <= hi:
            return style
    return None


def render_frame(
    state: str,
    scenario: Scenario,
    index: int,
    texture: np.ndarray | None = None,
) -> np.ndarray:
    """Render one frame; byte-deterministic in (scenario.seed, index)."""
    if texture is None:
        texture = _texture(scenario)
    canvas = texture.copy()
    if scenario.jitter:
        jrng = np.random.default_rng([scenario.seed, 7, index])
        delta = jrng.integers(-scenario.jitter, scenario.jitter + 1,
                              size=canvas.shape, dtype=np.int16)
        canvas = np.clip(canvas.astype(np.int16) + delta, 0, 255).astype(np.uint8)
    panel = scenario.panel
    canvas[panel.y:panel.y2, panel.x:panel.x2] = PANEL_FILL
    if scenario.decor:
        font.render_text(canvas, panel.x + 4, panel.y + 5, scenario.decor, ink=DECOR_INK)
    sx, sy = scenario.state_origin()
    font.render_text(canvas, sx, sy, state, ink=STATE_INK)

    style = _occlusion_at(scenario, index)
    if style is not None:
        region = panel.expand(2).clip(scenario.width, scenario.height)
        patch = canvas[region.y:region.y2, region.x:region.x2]
        if style == "panel":
            patch[:] = 205
        elif style == "noise":
            orng = np.random.default_rng([scenario.seed, 13, index])
            patch[:] = orng.integers(0, 256, size=patch.shape).astype(np.uint8)
        else:
            patch[:] = 70
            font.render_text(canvas, region.x + 10, region.y + 7, _AD_TEXT, ink=240)
    return canvas


@dataclass(frozen=True)
class BuildResult:
    scenario: Scenario
    frames: tuple[Frame, ...]
    intervals: tuple[StateInterval, ...]        # ground truth, duplicates merged
    chain: tuple[AlignedEvent, ...]             # ground-truth aligned events
    commentary: dict                            # canonical document for the loader
    roi: Roi                                    # what the locator should find
    marks: tuple[tuple[str, float], ...] = ()   # (event, onset seconds) per chain event


def build_match(scenario: Scenario) -> BuildResult:
    """Render the scenario in memory together with every truth artifact."""
    texture = _texture(scenario)
    states = _frame_states(scenario)
    frames = tuple(
        Frame.at_fps(i, render_frame(state, scenario, i, texture), scenario.fps)
        for i, state in enumerate(states)
    )

    intervals: list[StateInterval] = []
    step_interval: list[int] = []  # step index -> merged interval index
    start = 0
    for step in scenario.steps:
        end = start + step.frames - 1
        if intervals and intervals[-1].state == step.state:
            prev = intervals[-1]
            intervals[-1] = StateInterval(prev.state, prev.frame_start, end)
        else:
            intervals.append(StateInterval(step.state, start, end))
        step_interval.append(len(intervals) - 1)
        start = end + 1

    profile = scenario.profile
    chain = []
    marks = []
    entries = []
    event_start = 0
    for j, step in enumerate(scenario.steps):
        if step.event is not None:
            iv = intervals[step_interval[j]]
            chain.append(AlignedEvent(
                event=step.event,
                state=iv.state,
                frame_start=iv.frame_start,
                frame_end=iv.frame_end,
                t_start_ms=round(iv.frame_start * 1000 / scenario.fps),
                t_end_ms=round((iv.frame_end + 1) * 1000 / scenario.fps),
                text=step.text,
            ))
            # the mark is the instant the event's own step hits the screen
            marks.append((step.event, event_start / scenario.fps))
            entry: dict = {"state": step.state, "text": step.text}
            if profile.state_kind == "over_ball":
                if step.event == "w":
                    entry["wide"] = True
                elif step.event == "o":
                    entry["out"] = True
                else:
                    entry["runs"] = int(step.event)
            entries.append(entry)
        event_start += step.frames

    commentary = {
        "sport": scenario.sport,
        "match_id": scenario.match_id,
        "entries": entries,
    }
    return BuildResult(
        scenario=scenario,
        frames=frames,
        intervals=tuple(intervals),
        chain=tuple(chain),
        commentary=commentary,
        roi=scenario.expected_roi(),
        marks=tuple(marks),
    )


def generate_match(scenario: Scenario, out_dir: str | Path) -> BuildResult:
    """Write frames plus truth files; the layout the CLI consumes.

    out/frames/frame_*.png + manifest.json, out/commentary.json,
    out/scenario.json, and out/truth/{intervals.jsonl, chain.jsonl,
    roi.json, marks.json}.
    """
    result = build_match(scenario)
    out_dir = Path(out_dir)
    frames_dir = out_dir / "frames"
    truth_dir = out_dir / "truth"
    frames_dir.mkdir(parents=True, exist_ok=True)
    truth_dir.mkdir(parents=True, exist_ok=True)

    for frame in result.frames:
        imgio.save_gray(frames_dir / imgio.frame_name(frame.index), frame.pixels)
    imgio.write_manifest(
        frames_dir,
        fps=scenario.fps,
        count=len(result.frames),
        width=scenario.width,
        height=scenario.height,
    )
    with open(out_dir / "commentary.json", "w") as fh:
        json.dump(result.commentary, fh, indent=2)
        fh.write("\n")
    with open(out_dir / "scenario.json", "w") as fh:
        json.dump(scenario.to_dict(), fh, indent=2)
        fh.write("\n")
    write_intervals(result.intervals, truth_dir / "intervals.jsonl")
    write_chain(result.chain, truth_dir / "chain.jsonl")
    with open(truth_dir / "roi.json", "w") as fh:
        json.dump({"roi": result.roi.to_dict(), "panel": scenario.panel.to_dict()}, fh, indent=2)
        fh.write("\n")
    with open(truth_dir / "marks.json", "w") as fh:
        json.dump(
            {"marks": [{"event": e, "t_s": t} for e, t in result.marks]}, fh, indent=2
        )
        fh.write("\n")
    log.info("wrote %d frames for %s to %s", len(result.frames), scenario.match_id, out_dir)
    return result
