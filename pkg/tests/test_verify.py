import pytest

from asap_align.aligner import AlignedEvent
from asap_align.errors import LengthMismatchError
from asap_align.verify import read_marks, verify_alignment, write_marks


def ev(event, t_start_ms, t_end_ms):
    return AlignedEvent(event=event, state="", frame_start=0, frame_end=0,
                        t_start_ms=t_start_ms, t_end_ms=t_end_ms)


def test_empty_is_perfect(cricket):
    res = verify_alignment([], [], cricket)
    assert res.accuracy == 1.0
    assert res.verdicts == ()
    assert res.correct == 0


def test_seconds_tolerance_edges(cricket):
    # cricket: +/- 1s slack around [2.0, 4.0]
    predicted = [ev("4", 2000, 4000)] * 5
    marks = [("4", 1.0), ("4", 0.99), ("4", 5.0), ("4", 5.01), ("4", 3.0)]
    res = verify_alignment(predicted, marks, cricket)
    assert res.verdicts == (True, False, True, False, True)
    assert res.accuracy == pytest.approx(3 / 5)
    assert res.correct == 3


def test_basketball_second_tolerance(basketball):
    predicted = [ev("layup", 10_000, 12_000), ev("dunk", 30_000, 31_000)]
    good = verify_alignment(predicted, [("layup", 9.0), ("dunk", 32.0)], basketball)
    assert good.accuracy == 1.0
    bad = verify_alignment(predicted, [("layup", 8.9), ("dunk", 32.1)], basketball)
    assert bad.accuracy == 0.0


def test_minute_containment(football):
    # football: the mark's broadcast minute must overlap the interval's
    predicted = [ev("touchdown", 58_000, 61_000)]  # spans minutes 0 and 1
    assert verify_alignment(predicted, [("touchdown", 5.0)], football).accuracy == 1.0
    assert verify_alignment(predicted, [("touchdown", 119.0)], football).accuracy == 1.0
    assert verify_alignment(predicted, [("touchdown", 120.0)], football).accuracy == 0.0
    inside = [ev("touchdown", 60_000, 65_000)]  # minute 1 only
    assert verify_alignment(inside, [("touchdown", 59.9)], football).accuracy == 0.0


def test_length_mismatch_raises(cricket):
    with pytest.raises(LengthMismatchError):
        verify_alignment([ev("4", 0, 1000)], [], cricket)


def test_label_mismatch_raises(cricket):
    with pytest.raises(ValueError, match="chain order"):
        verify_alignment([ev("4", 0, 1000)], [("o", 0.5)], cricket)


def test_truth_against_itself_is_perfect(cricket):
    predicted = [ev(str(b), b * 2000, (b + 1) * 2000) for b in range(8)]
    marks = [(str(b), b * 2.0 + 1.0) for b in range(8)]
    res = verify_alignment(predicted, marks, cricket)
    assert res.accuracy == 1.0


def test_marks_file_round_trip(tmp_path):
    marks = [("4", 12.5), ("o", 31.0), ("w", 44.25)]
    path = tmp_path / "marks.json"
    write_marks(marks, path)
    assert read_marks(path) == marks
