"""Play-by-play loading, normalization, and event classification.

Commentary arrives as a JSON document with one entry per event, keyed
by the match state shown on the scorecard at that moment. Cricket
entries carry explicit runs/out/wide flags (precedence wide > out >
runs); clock sports are classified by keyword against the profile's
trigger table. American football needs a timestamp adjustment:
broadcast clocks key a touchdown entry at the moment of celebration,
one play after the scoring snap, so the entry is re-keyed to its
predecessor's state.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from asap_align.errors import DuplicateStateError, SchemaError, StateParseError
from asap_align.model import GameClock, MatchState, compare_states, format_state, parse_match_state
from asap_align.profiles import SportProfile


@dataclass(frozen=True)
class CommentaryEntry:
    state: MatchState
    text: str = ""
    event: str | None = None     # cricket token; clock sports classify lazily
    confidence: str = "normal"   # "low" once a low-trust keyword matched
    adjusted: bool = False       # state was re-keyed; adjustment is idempotent

    @property
    def state_text(self) -> str:
        return format_state(self.state)


def classify_event(text: str, profile: SportProfile) -> str | None:
    """First label in the profile's table with a trigger substring in text."""
    return profile.classify(text)


def _cricket_token(entry: dict, path: str) -> str:
    if entry.get("wide"):
        return "w"
    if entry.get("out"):
        return "o"
    runs = entry.get("runs")
    if runs is None:
        raise SchemaError("cricket entry needs runs, out, or wide", path=path)
    if not isinstance(runs, int) or not 0 <= runs <= 9:
        raise SchemaError(f"runs must be an integer in [0, 9], got {runs!r}", path=path)
    return str(runs)


def load_commentary(
    document: str | dict,
    profile: SportProfile,
    allow_duplicate_states: bool = False,
) -> list[CommentaryEntry]:
    """Parse and normalize a commentary document into sorted entries.

    Entries come back sorted by match progression (stable, so a wide
    that shares its state with the re-delivery keeps document order).
    Duplicate over.ball keys raise DuplicateStateError unless explicitly
    allowed; clock keys may repeat freely.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}", path="$") from None
    if not isinstance(document, dict):
        raise SchemaError("document must be a JSON object", path="$")
    sport = document.get("sport")
    if sport != profile.name:
        raise SchemaError(f"sport {sport!r} does not match profile {profile.name!r}", path="sport")
    raw_entries = document.get("entries")
    if not isinstance(raw_entries, list):
        raise SchemaError("entries must be a list", path="entries")

    entries: list[CommentaryEntry] = []
    for i, raw in enumerate(raw_entries):
        path = f"entries[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("entry must be an object", path=path)
        state_text = raw.get("state")
        if not isinstance(state_text, str):
            raise SchemaError("entry needs a state string", path=path)
        try:
            state = parse_match_state(state_text, profile)
        except StateParseError as exc:
            raise SchemaError(f"bad state {state_text!r}: {exc}", path=path) from None
        period = raw.get("period")
        if period is not None and isinstance(state, GameClock):
            if not isinstance(period, int) or period < 1:
                raise SchemaError("period must be a positive integer", path=path)
            state = dataclasses.replace(state, period=period)
        text = raw.get("text", "")
        if not isinstance(text, str):
            raise SchemaError("text must be a string", path=path)
        event = _cricket_token(raw, path) if profile.state_kind == "over_ball" else None
        entries.append(CommentaryEntry(state=state, text=text, event=event))

    entries.sort(key=lambda e: _ProgressKey(e.state))
    if profile.state_kind == "over_ball" and not allow_duplicate_states:
        for a, b in zip(entries, entries[1:]):
            if compare_states(a.state, b.state) == 0:
                raise DuplicateStateError(
                    f"duplicate state key {a.state_text}; wides repeat the previous "
                    "delivery's state, pass allow_duplicate_states to accept them"
                )
    return entries


class _ProgressKey:
    """cmp_to_key shim over compare_states for stable sorting."""

    __slots__ = ("state",)

    def __init__(self, state: MatchState) -> None:
        self.state = state

    def __lt__(self, other: "_ProgressKey") -> bool:
        return compare_states(self.state, other.state) < 0


def adjust_timestamps(
    entries: Sequence[CommentaryEntry], profile: SportProfile
) -> list[CommentaryEntry]:
    """Re-key celebration-delayed entries to their predecessor's state.

    Only profiles with an adjust keyword do anything (american_football:
    "touchdown" moves, "penalty" only lowers confidence). The adjusted
    flag makes a second application a no-op, and a first entry with no
    predecessor is left where it is.
    """
    move_kw = profile.adjust_move_keyword
    low_kw = profile.adjust_low_keyword
    if move_kw is None and low_kw is None:
        return list(entries)
    out: list[CommentaryEntry] = []
    for i, entry in enumerate(entries):
        lowered = entry.text.lower()
        if move_kw and move_kw in lowered and not entry.adjusted:
            if i > 0:
                entry = dataclasses.replace(
                    entry, state=entries[i - 1].state, adjusted=True
                )
        elif low_kw and low_kw in lowered and entry.confidence != "low":
            entry = dataclasses.replace(entry, confidence="low")
        out.append(entry)
    return out


def load_commentary_file(
    path: str | Path, profile: SportProfile, allow_duplicate_states: bool = False
) -> list[CommentaryEntry]:
    with open(path) as fh:
        return load_commentary(fh.read(), profile, allow_duplicate_states)
