import json

import pytest

from stillscan.events import EventEngine, STAGE_ORDER
from stillscan.geometry import Rect
from stillscan.ncc import MonitorOutcome
from stillscan.tracking import TrackedObject


def candidate(object_id, first_seen, bbox=Rect(10, 10, 20, 15), frame=None):
    frame = frame if frame is not None else first_seen
    return TrackedObject(
        id=object_id,
        bbox=bbox,
        consecutive_frames=frame - first_seen + 1,
        first_seen_frame=first_seen,
        last_matched_frame=frame,
    )


def drive(engine, object_id, first_seen, frames, outcomes_by_frame=None):
    outcomes_by_frame = outcomes_by_frame or {}
    events = []
    for frame in frames:
        cands = [candidate(object_id, first_seen, frame=frame)]
        events.extend(
            engine.advance(frame, cands, outcomes_by_frame.get(frame, []))
        )
    return events


class TestStageThresholds:
    def test_object_static_through_park_threshold(self):
        # static frames 100..400 at 30 fps: stopped at 150, parked at 250,
        # no moved; duration at frame 400 is 10 s
        engine = EventEngine(fps=30.0)
        events = drive(engine, 1, 100, range(100, 401))
        kinds = [(e.event_type, e.frame_index) for e in events]
        assert kinds == [("stopped", 150), ("parked", 250)]
        summary = engine.report()
        assert summary.rows[0].duration_s == pytest.approx(10.0)
        stopped = events[0]
        assert stopped.timestamp_s == pytest.approx(5.0)
        assert stopped.duration_s == pytest.approx(50 / 30)

    def test_departure_before_park_threshold_closes_as_stopped(self):
        engine = EventEngine(fps=30.0)
        events = drive(engine, 1, 100, range(100, 241))
        for frame in range(241, 260):
            events.extend(engine.advance(frame, [], []))
        assert [e.event_type for e in events] == ["stopped"]
        summary = engine.report()
        assert summary.rows[0].final_stage == "stopped"
        assert summary.rows[0].parked_at_frame is None
        assert summary.max_parking_minutes is None

    def test_tracking_object_that_departs_is_silent(self):
        engine = EventEngine(fps=30.0)
        events = drive(engine, 1, 100, range(100, 130))
        for frame in range(130, 150):
            events.extend(engine.advance(frame, [], []))
        assert events == []
        assert engine.report().rows == []

    def test_moved_transition_from_monitor(self):
        engine = EventEngine(fps=30.0)
        events = drive(engine, 1, 100, range(100, 301))
        outcome = MonitorOutcome(1, "moved", 0.42)
        events.extend(engine.advance(301, [], [outcome]))
        assert [e.event_type for e in events] == ["stopped", "parked", "moved"]
        moved = events[-1]
        assert moved.gamma == pytest.approx(0.42)
        assert moved.frame_index == 301
        assert engine.report().rows[0].final_stage == "moved"

    def test_candidate_arriving_late_passes_stages_in_order(self):
        # a candidate first reported when its duration already exceeds both
        # thresholds emits stopped then parked, same frame, in order
        engine = EventEngine(fps=30.0)
        events = engine.advance(300, [candidate(1, 100, frame=300)], [])
        assert [e.event_type for e in events] == ["stopped", "parked"]

    def test_moved_for_unknown_object_raises(self):
        engine = EventEngine(fps=30.0)
        with pytest.raises(ValueError, match="unknown or non-parked"):
            engine.advance(10, [], [MonitorOutcome(7, "moved", 0.1)])

    def test_moved_for_not_yet_parked_object_raises(self):
        engine = EventEngine(fps=30.0)
        engine.advance(100, [candidate(1, 100)], [])
        with pytest.raises(ValueError, match="unknown or non-parked"):
            engine.advance(101, [candidate(1, 100, frame=101)],
                           [MonitorOutcome(1, "moved", 0.1)])

    def test_postponed_outcome_logged_for_parked_object(self):
        engine = EventEngine(fps=30.0)
        drive(engine, 1, 100, range(100, 260))
        events = engine.advance(260, [candidate(1, 100, frame=260)],
                                [MonitorOutcome(1, "postponed")])
        assert [e.event_type for e in events] == ["postponed_check"]
        assert events[0].gamma is None

    def test_frame_index_must_not_decrease(self):
        engine = EventEngine(fps=30.0)
        engine.advance(10, [], [])
        with pytest.raises(ValueError, match="non-decreasing"):
            engine.advance(9, [], [])


class TestEventStream:
    def test_stage_monotonicity_over_random_streams(self):
        import random

        rng = random.Random(13)
        for _ in range(20):
            engine = EventEngine(fps=30.0, stop_threshold_frames=5,
                                 park_threshold_frames=12, miss_limit=2)
            per_object: dict[int, list[str]] = {}
            present: dict[int, int] = {}
            for frame in range(120):
                cands = []
                for oid in (1, 2, 3):
                    if rng.random() < 0.8:
                        first = present.setdefault(oid, frame)
                        cands.append(candidate(oid, first, frame=frame))
                    elif rng.random() < 0.3:
                        present.pop(oid, None)
                outcomes = []
                for ev in engine.advance(frame, cands, outcomes):
                    if ev.event_type in STAGE_ORDER:
                        per_object.setdefault(ev.object_id, []).append(ev.event_type)
            for stages in per_object.values():
                order = [STAGE_ORDER.index(s) for s in stages]
                assert order == sorted(order)
                assert len(set(stages)) == len(stages)

    def test_duration_recomputes_from_frames_and_fps(self):
        engine = EventEngine(fps=25.0)
        events = drive(engine, 1, 0, range(0, 200))
        for event in events:
            assert event.duration_s == event.frame_index / 25.0
            assert event.timestamp_s == event.frame_index / 25.0

    def test_json_line_schema(self):
        engine = EventEngine(fps=30.0)
        events = drive(engine, 1, 100, range(100, 151))
        record = json.loads(events[0].to_json())
        assert list(record) == [
            "event_type", "object_id", "frame_index", "timestamp_s",
            "bbox", "gamma", "duration_s",
        ]
        assert record["bbox"] == [10, 10, 20, 15]
        assert record["gamma"] is None


class TestReport:
    def test_empty_summary(self):
        engine = EventEngine(fps=30.0)
        summary = engine.report()
        assert summary.rows == []
        assert summary.max_parking_minutes is None
        assert "n/a" in summary.to_text()

    def test_max_parking_duration_formatting(self):
        # 7440 frames at 30 fps = 4.1333 minutes, shown as 4.13
        engine = EventEngine(fps=30.0)
        drive(engine, 1, 0, range(0, 7441, 10))
        summary = engine.report()
        assert summary.max_parking_minutes == pytest.approx(7440 / 30 / 60)
        assert "4.13 minutes" in summary.to_text()

    def test_rows_ordered_by_object_id(self):
        engine = EventEngine(fps=30.0)
        for frame in range(0, 200):
            cands = [candidate(2, 0, frame=frame), candidate(1, 0, frame=frame)]
            engine.advance(frame, cands, [])
        rows = engine.report().rows
        assert [r.object_id for r in rows] == [1, 2]
        csv_text = engine.report().to_csv()
        assert csv_text.splitlines()[0].startswith("object_id,")
        assert len(csv_text.splitlines()) == 3
