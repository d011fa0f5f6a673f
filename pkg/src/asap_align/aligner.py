"""Join commentary entries onto extracted state intervals.

Over.ball keys join exactly: every delivery gets its own displayed
state. Clock keys join by coverage: commentary timestamps land inside
the interval whose displayed time spans them, because the clock ticks
on between events. Either way the output is an event chain ordered by
frame time, exportable as JSON lines or SRT subtitles.
"""

from __future__ import annotations

import json
import logging
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from asap_align.commentary import CommentaryEntry, classify_event
from asap_align.model import StateInterval, compare_states, format_state, parse_match_state
from asap_align.profiles import SportProfile

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlignedEvent:
    event: str                # cricket token, taxonomy label, or "unclassified"
    state: str
    frame_start: int
    frame_end: int            # inclusive
    t_start_ms: int
    t_end_ms: int             # exclusive edge: (frame_end + 1) / fps
    text: str = ""
    confidence: str = "normal"

    def to_dict(self) -> dict:
        return {
            "event": self.event,
            "state": self.state,
            "frame_start": self.frame_start,
            "frame_end": self.frame_end,
            "t_start_ms": self.t_start_ms,
            "t_end_ms": self.t_end_ms,
            "text": self.text,
            "confidence": self.confidence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlignedEvent":
        return cls(
            event=d["event"],
            state=d.get("state", ""),
            frame_start=d["frame_start"],
            frame_end=d["frame_end"],
            t_start_ms=d["t_start_ms"],
            t_end_ms=d["t_end_ms"],
            text=d.get("text", ""),
            confidence=d.get("confidence", "normal"),
        )


@dataclass(frozen=True)
class AlignResult:
    events: tuple[AlignedEvent, ...]
    unmatched_entries: tuple[CommentaryEntry, ...]
    unmatched_intervals: tuple[StateInterval, ...]  # informational; clock ticks mostly
    ambiguous: int                                  # entries that matched several intervals


def align(
    intervals: Sequence[StateInterval],
    entries: Sequence[CommentaryEntry],
    fps: float,
    profile: SportProfile,
) -> AlignResult:
    """Attach each commentary entry to the interval displaying its state.

    An entry whose key matches more than one interval (a plateau split
    by dropped observations) goes to the earlier interval and is counted
    as ambiguous. Entries with no home are reported, never guessed.
    """
    if fps <= 0:
        raise ValueError("fps must be positive")
    states = [parse_match_state(iv.state, profile) for iv in intervals]
    exact: dict[str, list[int]] = {}
    for i, s in enumerate(states):
        exact.setdefault(format_state(s), []).append(i)

    aligned: list[tuple[int, int, AlignedEvent]] = []  # (interval idx, entry idx, event)
    unmatched: list[CommentaryEntry] = []
    hit = [False] * len(intervals)
    ambiguous = 0
    keys = None
    if profile.state_kind == "clock":
        keys = [_progress(s) for s in states]

    for j, entry in enumerate(entries):
        key = format_state(entry.state)
        slots = exact.get(key, [])
        if len(slots) > 1:
            ambiguous += 1
            log.warning("entry %s matches %d intervals; keeping the earliest", key, len(slots))
        if slots:
            idx = slots[0]
        elif keys is not None:
            # coverage join: last interval at or before the entry's clock
            idx = bisect_right(keys, _progress(entry.state)) - 1
            if idx < 0:
                unmatched.append(entry)
                continue
        else:
            unmatched.append(entry)
            continue
        iv = intervals[idx]
        hit[idx] = True
        label = entry.event or classify_event(entry.text, profile) or "unclassified"
        confidence = "adjusted" if entry.adjusted else entry.confidence
        aligned.append((idx, j, AlignedEvent(
            event=label,
            state=iv.state,
            frame_start=iv.frame_start,
            frame_end=iv.frame_end,
            t_start_ms=round(iv.frame_start * 1000 / fps),
            t_end_ms=round((iv.frame_end + 1) * 1000 / fps),
            text=entry.text,
            confidence=confidence,
        )))

    aligned.sort(key=lambda item: (item[0], item[1]))
    return AlignResult(
        events=tuple(ev for _, _, ev in aligned),
        unmatched_entries=tuple(unmatched),
        unmatched_intervals=tuple(iv for i, iv in enumerate(intervals) if not hit[i]),
        ambiguous=ambiguous,
    )


def _progress(state) -> tuple:
    # strip the period so a bare clock key can still land inside a period-tagged
    # interval; direction makes elapsed monotone either way
    sign = -1 if getattr(state, "direction", "up") == "down" else 1
    period = getattr(state, "period", None)
    return (period if period is not None else 0, sign * state.elapsed_s())


def event_label_text(event: str) -> str:
    """Human-readable label: run counts pluralized, tokens spelled out."""
    if event.isdigit():
        n = int(event)
        return f"{n} run" if n == 1 else f"{n} runs"
    if event == "o":
        return "wicket"
    if event == "w":
        return "wide"
    return event


def _srt_time(ms: int) -> str:
    s, ms = divmod(ms, 1000)
    m, s = divmod(s, 60)
    h, m = divmod(m, 60)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def to_srt(events: Sequence[AlignedEvent]) -> str:
    """Render the chain as SubRip text (LF line endings, 1-based cues)."""
    if not events:
        raise ValueError("cannot render an empty chain")
    cues = []
    for i, ev in enumerate(events, start=1):
        line = event_label_text(ev.event)
        if ev.text:
            line = f"{line}: {ev.text}"
        cues.append(f"{i}\n{_srt_time(ev.t_start_ms)} --> {_srt_time(ev.t_end_ms)}\n{line}\n\n")
    return "".join(cues)


def write_chain(events: Sequence[AlignedEvent], path: str | Path) -> None:
    """Event chain as JSON lines, one aligned event per line."""
    with open(path, "w") as fh:
        for ev in events:
            fh.write(json.dumps(ev.to_dict()) + "\n")


def read_chain(path: str | Path) -> list[AlignedEvent]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(AlignedEvent.from_dict(json.loads(line)))
    return out
