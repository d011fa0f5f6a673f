"""Core value types: frames, regions, match states, and state intervals.

A "match state" is the piece of the scorecard that advances as the
match progresses: cricket shows overs and balls ("30.4"), the clock
sports show a game clock ("07:41", optionally preceded by a period
marker such as "Q3" or "3rd"). State text is the join key between
frames and commentary, so parsing and formatting round-trip exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from asap_align.errors import IncomparableStatesError, StateParseError, UnsupportedEventError

BALLS_PER_OVER = 6


@dataclass(frozen=True, eq=False)
class Frame:
    """One grayscale frame of a sequence; timestamp follows from index and fps."""

    index: int
    timestamp_ms: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.index < 0 or self.timestamp_ms < 0:
            raise ValueError("frame index and timestamp must be non-negative")
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise ValueError("frame pixels must be a non-empty 2-d raster")

    @classmethod
    def at_fps(cls, index: int, pixels: np.ndarray, fps: float) -> "Frame":
        return cls(index=index, timestamp_ms=round(index * 1000 / fps), pixels=pixels)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class Roi:
    """Axis-aligned pixel rectangle; x/y is the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"degenerate roi {self}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    def area(self) -> int:
        return self.w * self.h

    def expand(self, margin: int) -> "Roi":
        return Roi(self.x - margin, self.y - margin, self.w + 2 * margin, self.h + 2 * margin)

    def clip(self, width: int, height: int) -> "Roi":
        x = max(self.x, 0)
        y = max(self.y, 0)
        return Roi(x, y, min(self.x2, width) - x, min(self.y2, height) - y)

    def union(self, other: "Roi") -> "Roi":
        x = min(self.x, other.x)
        y = min(self.y, other.y)
        return Roi(x, y, max(self.x2, other.x2) - x, max(self.y2, other.y2) - y)

    def iou(self, other: "Roi") -> float:
        ix = max(self.x, other.x)
        iy = max(self.y, other.y)
        iw = min(self.x2, other.x2) - ix
        ih = min(self.y2, other.y2) - iy
        if iw <= 0 or ih <= 0:
            return 0.0
        inter = iw * ih
        return inter / (self.area() + other.area() - inter)

    def crop(self, pixels: np.ndarray) -> np.ndarray:
        """View (no copy) into a (h, w) raster."""
        return pixels[self.y:self.y2, self.x:self.x2]

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "Roi":
        return cls(int(d["x"]), int(d["y"]), int(d["w"]), int(d["h"]))


@dataclass(frozen=True)
class OverBall:
    """Cricket progress "O.B": ball B (1-6) with O the displayed over number."""

    over: int
    ball: int

    def ball_index(self) -> int:
        """Deliveries on a single axis, for step distances between states."""
        return self.over * BALLS_PER_OVER + (self.ball - 1)

    def successor(self) -> "OverBall":
        if self.ball < BALLS_PER_OVER:
            return OverBall(self.over, self.ball + 1)
        return OverBall(self.over + 1, 1)

    def __str__(self) -> str:
        return f"{self.over}.{self.ball}"


@dataclass(frozen=True)
class GameClock:
    """Game clock, optionally qualified by a period, running up or down."""

    minute: int
    second: int
    period: int | None = None
    direction: str = "up"  # "up" (soccer) or "down" (basketball, football)

    def elapsed_s(self) -> int:
        return self.minute * 60 + self.second

    def successor(self) -> "GameClock":
        if self.direction == "down":
            if self.minute == 0 and self.second == 0:
                return self  # saturate at 0:00
            if self.second == 0:
                return GameClock(self.minute - 1, 59, self.period, self.direction)
            return GameClock(self.minute, self.second - 1, self.period, self.direction)
        if self.second == 59:
            return GameClock(self.minute + 1, 0, self.period, self.direction)
        return GameClock(self.minute, self.second + 1, self.period, self.direction)

    def __str__(self) -> str:
        clock = f"{self.minute:02d}:{self.second:02d}"
        return clock if self.period is None else f"Q{self.period} {clock}"


MatchState = OverBall | GameClock

_OVER_BALL_RE = re.compile(r"(\d{1,3})\.(\d)")
_CLOCK_RE = re.compile(
    r"(?:(?:Q(\d+)|(\d+)\s*(?:st|nd|rd|th))\s+)?(\d{1,3}):([0-5]\d)", re.IGNORECASE
)


def parse_match_state(text: str, profile) -> MatchState:
    """Extract the first match-state token from raw OCR text.

    Stray characters around the token are ignored; the grammar comes
    from profile.state_kind. Over.ball validation is strict (a ball
    digit of 0 or 7-9 marks the read as OCR noise) so bogus states are
    rejected here rather than entering the timeline.
    """
    if profile.state_kind == "over_ball":
        m = _OVER_BALL_RE.search(text)
        if m is None:
            raise StateParseError(f"no over.ball token in {text!r}")
        over, ball = int(m.group(1)), int(m.group(2))
        if not 1 <= ball <= BALLS_PER_OVER:
            raise StateParseError(f"ball digit {ball} outside 1..{BALLS_PER_OVER} in {text!r}")
        return OverBall(over, ball)
    if profile.state_kind == "clock":
        m = _CLOCK_RE.search(text)
        if m is None:
            raise StateParseError(f"no clock token in {text!r}")
        period = None
        if m.group(1) is not None:
            period = int(m.group(1))
        elif m.group(2) is not None:
            period = int(m.group(2))
        return GameClock(int(m.group(3)), int(m.group(4)), period, profile.clock_direction)
    raise ValueError(f"unknown state kind: {profile.state_kind!r}")


def format_state(state: MatchState) -> str:
    """Canonical text of a state; parse_match_state of it returns the state back."""
    return str(state)


def state_successor(state: MatchState) -> MatchState:
    return state.successor()


def _progress_key(state: GameClock) -> int:
    # down-running clocks progress as remaining time shrinks
    return -state.elapsed_s() if state.direction == "down" else state.elapsed_s()


def compare_states(a: MatchState, b: MatchState) -> int:
    """Order two states by match progress: -1 when `a` is earlier, 0, or 1.

    Periods are compared first when both states carry one; otherwise
    ordering falls back to the clock alone, since broadcasts drop the
    period marker intermittently.
    """
    if isinstance(a, OverBall) and isinstance(b, OverBall):
        ka, kb = (a.over, a.ball), (b.over, b.ball)
        return (ka > kb) - (ka < kb)
    if isinstance(a, GameClock) and isinstance(b, GameClock):
        if a.direction != b.direction:
            raise IncomparableStatesError(f"clock directions differ: {a} vs {b}")
        if a.period is not None and b.period is not None and a.period != b.period:
            return (a.period > b.period) - (a.period < b.period)
        ka, kb = _progress_key(a), _progress_key(b)
        return (ka > kb) - (ka < kb)
    raise IncomparableStatesError(f"cannot order {type(a).__name__} against {type(b).__name__}")


def state_step(a: MatchState, b: MatchState) -> int:
    """Forward distance from `a` to `b`: legal deliveries for over.ball,
    seconds for clocks. Negative when `b` is earlier. A period change
    cannot be measured in seconds, so it degrades to +/-1 and acts only
    as a direction signal for plausibility checks.
    """
    if isinstance(a, OverBall) and isinstance(b, OverBall):
        return b.ball_index() - a.ball_index()
    if isinstance(a, GameClock) and isinstance(b, GameClock):
        if a.direction != b.direction:
            raise IncomparableStatesError(f"clock directions differ: {a} vs {b}")
        if a.period is not None and b.period is not None and a.period != b.period:
            return 1 if b.period > a.period else -1
        return _progress_key(b) - _progress_key(a)
    raise IncomparableStatesError(f"cannot measure {type(a).__name__} to {type(b).__name__}")


@dataclass(frozen=True)
class StateInterval:
    """A run of frames whose scorecard shows one state; frame_end is inclusive."""

    state: str
    frame_start: int
    frame_end: int

    def __post_init__(self) -> None:
        if self.frame_end < self.frame_start:
            raise ValueError(f"inverted interval {self}")

    def n_frames(self) -> int:
        return self.frame_end - self.frame_start + 1

    def to_dict(self) -> dict:
        return {"state": self.state, "frame_start": self.frame_start, "frame_end": self.frame_end}

    @classmethod
    def from_dict(cls, d: dict) -> "StateInterval":
        return cls(str(d["state"]), int(d["frame_start"]), int(d["frame_end"]))


def event_runs(label: str) -> int:
    """Runs contributed by one cricket event token: a digit, 'o' (wicket), or 'w' (wide)."""
    if label.isdigit() and len(label) == 1:
        return int(label)
    if label == "o":
        return 0
    if label == "w":
        return 1
    raise UnsupportedEventError(f"no run value for event {label!r}")
