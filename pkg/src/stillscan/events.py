"""Incident lifecycle: tracking -> stopped -> parked -> moved.

A stationary candidate that stays put for the stop threshold becomes a
stopped incident; reaching the park threshold makes it parked (and triggers
reference registration for NCC monitoring); a monitor verdict of moved closes
it. Stopped objects that leave before the park threshold are closed as
stopped-but-not-parked. Durations count frames from the candidate's first
sighting and are reported in seconds of video time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .geometry import Rect
from .ncc import MonitorOutcome
from .tracking import TrackedObject

STAGE_ORDER = ("tracking", "stopped", "parked", "moved")


@dataclass
class IncidentState:
    object_id: int
    stage: str
    stop_start_frame: int
    bbox: Rect
    total_stopped_frames: int = 0
    stopped_at_frame: int | None = None
    parked_at_frame: int | None = None
    moved_at_frame: int | None = None
    last_gamma: float | None = None
    absent_frames: int = 0


@dataclass(frozen=True)
class IncidentEvent:
    event_type: str  # stopped | parked | moved | postponed_check
    object_id: int
    frame_index: int
    timestamp_s: float
    bbox: Rect
    gamma: float | None
    duration_s: float

    def to_json(self) -> str:
        return json.dumps({
            "event_type": self.event_type,
            "object_id": self.object_id,
            "frame_index": self.frame_index,
            "timestamp_s": self.timestamp_s,
            "bbox": list(self.bbox),
            "gamma": self.gamma,
            "duration_s": self.duration_s,
        })


@dataclass
class SummaryRow:
    object_id: int
    final_stage: str
    stop_start_frame: int
    stopped_at_frame: int | None
    parked_at_frame: int | None
    moved_at_frame: int | None
    duration_s: float


@dataclass
class RunSummary:
    rows: list[SummaryRow]
    max_parking_minutes: float | None

    def to_text(self) -> str:
        lines = ["object  stage    stop_frame  stopped  parked  moved   duration_s"]
        for r in self.rows:
            lines.append(
                f"{r.object_id:>6}  {r.final_stage:<8} {r.stop_start_frame:>9}  "
                f"{_opt(r.stopped_at_frame):>7}  {_opt(r.parked_at_frame):>6}  "
                f"{_opt(r.moved_at_frame):>5}  {r.duration_s:>10.3f}"
            )
        if self.max_parking_minutes is not None:
            lines.append(f"max parking duration: {self.max_parking_minutes:.2f} minutes")
        else:
            lines.append("max parking duration: n/a")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["object_id,final_stage,stop_start_frame,stopped_at_frame,"
                 "parked_at_frame,moved_at_frame,duration_s"]
        for r in self.rows:
            lines.append(
                f"{r.object_id},{r.final_stage},{r.stop_start_frame},"
                f"{_opt(r.stopped_at_frame)},{_opt(r.parked_at_frame)},"
                f"{_opt(r.moved_at_frame)},{r.duration_s}"
            )
        return "\n".join(lines) + "\n"


def _opt(value: int | None) -> str:
    return "-" if value is None else str(value)


class EventEngine:
    """Per-object incident state machine driven once per frame."""

    def __init__(
        self,
        fps: float,
        stop_threshold_frames: int = 50,
        park_threshold_frames: int = 150,
        miss_limit: int = 5,
    ):
        if fps <= 0:
            raise ValueError("fps must be positive")
        if not 0 < stop_threshold_frames < park_threshold_frames:
            raise ValueError("need 0 < stop threshold < park threshold")
        self.fps = fps
        self.stop_threshold_frames = stop_threshold_frames
        self.park_threshold_frames = park_threshold_frames
        self.miss_limit = miss_limit
        self.active: dict[int, IncidentState] = {}
        self.closed: list[IncidentState] = []
        self.last_frame_index = -1

    def advance(
        self,
        frame_index: int,
        candidates: list[TrackedObject],
        monitor_outcomes: list[MonitorOutcome],
    ) -> list[IncidentEvent]:
        """Fold one frame's candidates and monitor verdicts into the lifecycle."""
        if frame_index < self.last_frame_index:
            raise ValueError("frame_index must be non-decreasing across calls")
        self.last_frame_index = frame_index
        events: list[IncidentEvent] = []
        seen: set[int] = set()

        for state in self.active.values():
            state.total_stopped_frames = frame_index - state.stop_start_frame

        for cand in sorted(candidates, key=lambda c: c.id):
            seen.add(cand.id)
            state = self.active.get(cand.id)
            if state is None:
                if cand.id in (s.object_id for s in self.closed):
                    continue  # retired object ids never reopen
                state = IncidentState(
                    object_id=cand.id,
                    stage="tracking",
                    stop_start_frame=cand.first_seen_frame,
                    bbox=cand.bbox,
                )
                self.active[cand.id] = state
            if state.stage != "parked":
                # Parked objects keep their registration-time bbox so the
                # monitor patch and the eventual moved event line up.
                state.bbox = cand.bbox
            state.absent_frames = 0
            duration = frame_index - state.stop_start_frame
            if state.stage == "tracking" and duration >= self.stop_threshold_frames:
                state.stage = "stopped"
                state.stopped_at_frame = frame_index
                events.append(self._event("stopped", state, frame_index))
            if state.stage == "stopped" and duration >= self.park_threshold_frames:
                state.stage = "parked"
                state.parked_at_frame = frame_index
                events.append(self._event("parked", state, frame_index))

        for outcome in monitor_outcomes:
            if outcome.outcome in ("skipped", "present"):
                state = self.active.get(outcome.object_id)
                if state is not None and outcome.gamma is not None:
                    state.last_gamma = outcome.gamma
                continue
            state = self.active.get(outcome.object_id)
            if state is None or state.stage != "parked":
                raise ValueError(
                    f"monitor outcome for unknown or non-parked object "
                    f"{outcome.object_id}"
                )
            if outcome.outcome == "postponed":
                events.append(self._event("postponed_check", state, frame_index))
            elif outcome.outcome == "moved":
                state.stage = "moved"
                state.moved_at_frame = frame_index
                state.last_gamma = outcome.gamma
                state.total_stopped_frames = frame_index - state.stop_start_frame
                events.append(
                    self._event("moved", state, frame_index, gamma=outcome.gamma)
                )
                self._retire(outcome.object_id)
            else:
                raise ValueError(f"unknown monitor outcome {outcome.outcome!r}")

        # Candidates that vanished: drop silent trackers, close stopped-not-parked.
        for object_id in list(self.active):
            state = self.active[object_id]
            if object_id in seen or state.stage == "parked":
                continue
            state.absent_frames += 1
            if state.absent_frames > self.miss_limit:
                if state.stage == "tracking":
                    del self.active[object_id]
                else:  # stopped but never parked
                    self._retire(object_id)
        return events

    def report(self) -> RunSummary:
        """Deterministic per-object summary; call after the run completes."""
        states = self.closed + [
            s for s in self.active.values() if s.stage != "tracking"
        ]
        states.sort(key=lambda s: s.object_id)
        rows = [
            SummaryRow(
                object_id=s.object_id,
                final_stage=s.stage,
                stop_start_frame=s.stop_start_frame,
                stopped_at_frame=s.stopped_at_frame,
                parked_at_frame=s.parked_at_frame,
                moved_at_frame=s.moved_at_frame,
                duration_s=s.total_stopped_frames / self.fps,
            )
            for s in states
        ]
        parked = [s for s in states if s.parked_at_frame is not None]
        max_minutes = (
            max(s.total_stopped_frames for s in parked) / self.fps / 60.0
            if parked else None
        )
        return RunSummary(rows=rows, max_parking_minutes=max_minutes)

    def _event(
        self,
        event_type: str,
        state: IncidentState,
        frame_index: int,
        gamma: float | None = None,
    ) -> IncidentEvent:
        return IncidentEvent(
            event_type=event_type,
            object_id=state.object_id,
            frame_index=frame_index,
            timestamp_s=frame_index / self.fps,
            bbox=state.bbox,
            gamma=gamma,
            duration_s=(frame_index - state.stop_start_frame) / self.fps,
        )

    def _retire(self, object_id: int) -> None:
        self.closed.append(self.active.pop(object_id))
