"""Per-sport configuration loaded from the packaged profiles.json.

A profile fixes everything sport-specific: how scoreboard text parses
(over.ball vs clock, which way the clock runs), how big a plausible
state step is, the verification tolerance, and the ordered keyword
table used to classify commentary text into event labels. Order in the
keyword table matters: the first label whose trigger substring appears
wins, which is how "incomplete pass" shadows "complete pass" and
"own goal" shadows "goal". Tables live in config rather than code so a
new sport needs no rebuild.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources


@dataclass(frozen=True)
class Tolerance:
    kind: str  # "seconds": within [start - slack, end + slack]; "minute": same minute
    slack_s: float


@dataclass(frozen=True)
class SportProfile:
    name: str
    state_kind: str  # "over_ball" or "clock"
    clock_direction: str  # "up" or "down"; ignored for over_ball
    max_step: int  # largest credible forward step between consecutive reads
    tolerance: Tolerance
    event_keywords: tuple[tuple[str, tuple[str, ...]], ...]  # ordered (label, triggers)
    token_aliases: dict[str, str] = field(default_factory=dict)
    adjust_move_keyword: str | None = None  # entry key moves to the previous entry's
    adjust_low_keyword: str | None = None  # entry kept but flagged low-confidence

    @property
    def taxonomy(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.event_keywords)

    def classify(self, text: str) -> str | None:
        """First label (in table order) with any trigger substring in `text`, else None."""
        low = text.lower()
        for label, triggers in self.event_keywords:
            if any(t in low for t in triggers):
                return label
        return None


@lru_cache(maxsize=1)
def load_profiles() -> dict[str, SportProfile]:
    raw = json.loads(resources.files("asap_align").joinpath("data/profiles.json").read_text())
    profiles = {}
    for name, d in raw.items():
        profiles[name] = SportProfile(
            name=name,
            state_kind=d["state_kind"],
            clock_direction=d["clock_direction"],
            max_step=int(d["max_step"]),
            tolerance=Tolerance(d["tolerance"]["kind"], float(d["tolerance"]["slack_s"])),
            event_keywords=tuple(
                (label, tuple(t.lower() for t in triggers))
                for label, triggers in d["event_keywords"]
            ),
            token_aliases=dict(d.get("token_aliases") or {}),
            adjust_move_keyword=d.get("adjust_move_keyword"),
            adjust_low_keyword=d.get("adjust_low_keyword"),
        )
    return profiles


def get_profile(name: str) -> SportProfile:
    profiles = load_profiles()
    try:
        return profiles[name]
    except KeyError:
        known = ", ".join(sorted(profiles))
        raise ValueError(f"unknown sport {name!r}; known: {known}") from None
