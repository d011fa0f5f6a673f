"""Alignment verification against human timestamp marks.

Marks are independent (event, seconds) pairs in chain order. An event
verifies when its mark falls inside the predicted interval widened by
the sport's tolerance: a slack in seconds for dense-state sports, or
same-broadcast-minute containment for sports whose commentary is only
minute-resolved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from asap_align.aligner import AlignedEvent
from asap_align.errors import LengthMismatchError
from asap_align.profiles import SportProfile


@dataclass(frozen=True)
class VerifyResult:
    accuracy: float
    verdicts: tuple[bool, ...]

    @property
    def correct(self) -> int:
        return sum(self.verdicts)


def verify_alignment(
    predicted: Sequence[AlignedEvent],
    marks: Sequence[tuple[str, float]],
    profile: SportProfile,
) -> VerifyResult:
    """Score predicted events against marks; both sequences pair up 1:1."""
    if len(predicted) != len(marks):
        raise LengthMismatchError(
            f"{len(predicted)} predicted events vs {len(marks)} marks"
        )
    tol = profile.tolerance
    verdicts = []
    for ev, (label, ts) in zip(predicted, marks):
        if label != ev.event:
            raise ValueError(
                f"mark {label!r} does not reference predicted event {ev.event!r}; "
                "marks must follow chain order"
            )
        start_s = ev.t_start_ms / 1000
        end_s = ev.t_end_ms / 1000
        if tol.kind == "seconds":
            ok = start_s - tol.slack_s <= ts <= end_s + tol.slack_s
        else:  # same-broadcast-minute containment
            ok = int(start_s // 60) <= int(ts // 60) <= int(end_s // 60)
        verdicts.append(ok)
    accuracy = sum(verdicts) / len(verdicts) if verdicts else 1.0
    return VerifyResult(accuracy=accuracy, verdicts=tuple(verdicts))


def read_marks(path: str | Path) -> list[tuple[str, float]]:
    """Marks file: {"marks": [{"event": ..., "t_s": ...}, ...]}."""
    with open(path) as fh:
        payload = json.load(fh)
    return [(m["event"], float(m["t_s"])) for m in payload["marks"]]


def write_marks(marks: Sequence[tuple[str, float]], path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump({"marks": [{"event": e, "t_s": t} for e, t in marks]}, fh, indent=2)
        fh.write("\n")
