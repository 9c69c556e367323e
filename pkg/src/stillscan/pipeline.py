"""End-to-end pipeline execution and throughput measurement.

`PipelineRunner` wires a detector, the NCC monitor and the event engine
together for one run: parked events register reference patches, moved events
release them and re-seed the background model under the vacated rectangle so
the spot is immediately available for fresh detections.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, replace

import numpy as np

from . import binary_ops
from .config import RunConfig
from .dual_bg import DualBackgroundDetector
from .events import EventEngine, IncidentEvent, RunSummary
from .frames import FrameSource, GrayFrame, extract_roi, open_frame_source
from .ncc import StationaryObjectMonitor
from .single_bg import SingleBackgroundDetector


def build_detector(config: RunConfig, width: int, height: int):
    min_area = max(1, round(config.min_area_fraction * width * height))
    if config.pipeline == "single":
        return SingleBackgroundDetector(
            width, height,
            gmm_params=config.gmm,
            rate=config.single_rate,
            tau=config.tau,
            tau_motion=config.tau_motion,
            guard_radius=config.guard_radius,
            morph_radius=config.morph_radius,
            min_area=min_area,
            overlap_threshold=config.overlap_threshold,
            overlap_mode=config.overlap_mode,
            miss_limit=config.miss_limit,
            stop_threshold_frames=config.stop_threshold_frames,
        )
    return DualBackgroundDetector(
        width, height,
        gmm_params=config.gmm,
        fast_rate=config.fast_rate,
        slow_rate=config.slow_rate,
        tau_bgdiff=config.tau_bgdiff,
        morph_radius=config.morph_radius,
        min_area=min_area,
        overlap_threshold=config.overlap_threshold,
        overlap_mode=config.overlap_mode,
        miss_limit=config.miss_limit,
        confirm_frames=config.confirm_frames,
    )


class PipelineRunner:
    """Per-frame orchestration of detector, monitor and event engine."""

    def __init__(self, config: RunConfig, width: int, height: int):
        self.config = config
        self.detector = build_detector(config, width, height)
        self.monitor = StationaryObjectMonitor(
            fps=config.fps,
            ncc_threshold=config.ncc_threshold,
            refresh_interval_s=config.refresh_interval_s,
            refresh_min_ncc=config.refresh_min_ncc,
            refresh_enabled=config.refresh_enabled,
            halo=config.halo,
            occlusion_fraction=config.occlusion_fraction,
        )
        self.engine = EventEngine(
            fps=config.fps,
            stop_threshold_frames=config.stop_frames,
            park_threshold_frames=config.park_frames,
            miss_limit=config.miss_limit,
        )
        self.prev: GrayFrame | None = None
        self.events: list[IncidentEvent] = []
        self.frames_processed = 0

    def process(self, frame: GrayFrame) -> list[IncidentEvent]:
        if self.prev is not None:
            motion = binary_ops.frame_difference(
                frame.pixels, self.prev.pixels, self.config.tau_motion
            )
        else:
            motion = np.zeros(frame.pixels.shape, dtype=bool)
        candidates = self.detector.step(frame, self.prev)
        outcomes = self.monitor.step(frame, motion)
        events = self.engine.advance(frame.frame_index, candidates, outcomes)
        for event in events:
            if event.event_type == "parked":
                self.monitor.register(frame, event.object_id, event.bbox)
            elif event.event_type == "moved":
                self.monitor.release(event.object_id)
                self.detector.reset_region(event.bbox, frame)
        self.prev = frame
        self.frames_processed += 1
        self.events.extend(events)
        return events


@dataclass
class RunResult:
    events: list[IncidentEvent]
    summary: RunSummary
    frames_processed: int
    runner: PipelineRunner


def _roi_frames(config: RunConfig, source):
    if config.roi is None:
        yield from source
    else:
        rois = list(config.roi)
        for frame in source:
            yield extract_roi(frame, rois)


def run_frames(config: RunConfig, frames) -> RunResult:
    """Run the configured pipeline over an iterable of (ROI-sized) frames."""
    runner: PipelineRunner | None = None
    for frame in frames:
        if runner is None:
            runner = PipelineRunner(config, frame.width, frame.height)
        runner.process(frame)
    if runner is None:
        raise ValueError("no frames to process")
    return RunResult(
        events=runner.events,
        summary=runner.engine.report(),
        frames_processed=runner.frames_processed,
        runner=runner,
    )


def open_configured_source(config: RunConfig) -> FrameSource:
    if config.input_path is None:
        raise ValueError("config has no input.path")
    return open_frame_source(
        config.input_path, config.fps,
        width=config.input_width, height=config.input_height,
    )


def run(config: RunConfig) -> RunResult:
    """Open the configured input and run the pipeline over it."""
    return run_frames(config, _roi_frames(config, open_configured_source(config)))


def write_event_log(events: list[IncidentEvent], path) -> None:
    with open(path, "w") as fh:
        for event in events:
            fh.write(event.to_json() + "\n")


@dataclass(frozen=True)
class BenchRow:
    pipeline: str
    roi_w: int
    roi_h: int
    fps: float


def preload_frames(config: RunConfig) -> list[GrayFrame]:
    """Decode and ROI-extract all input frames up front."""
    return list(_roi_frames(config, open_configured_source(config)))


def measure_fps(frames: list[GrayFrame], step) -> float:
    """Wall-clock frames/second of `step(frame)` over the preloaded frames."""
    start = time.perf_counter()
    for frame in frames:
        step(frame)
    elapsed = time.perf_counter() - start
    return len(frames) / elapsed if elapsed > 0 else float("inf")


def bench(config: RunConfig, repetitions: int,
          frames: list[GrayFrame] | None = None) -> list[BenchRow]:
    """Median throughput of both pipelines over full runs on preloaded frames.

    Only relative numbers are meaningful; absolute frames/second depend on the
    host machine.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if frames is None:
        frames = preload_frames(config)
    if not frames:
        raise ValueError("no frames to benchmark")
    height, width = frames[0].pixels.shape
    rows = []
    for pipeline in ("single", "dual"):
        variant = replace(config, pipeline=pipeline)
        samples = []
        for _ in range(repetitions):
            runner = PipelineRunner(variant, width, height)
            samples.append(measure_fps(frames, runner.process))
        rows.append(BenchRow(pipeline, width, height, statistics.median(samples)))
    return rows


def bench_csv(rows: list[BenchRow]) -> str:
    lines = ["pipeline,roi_w,roi_h,fps"]
    for row in rows:
        lines.append(f"{row.pipeline},{row.roi_w},{row.roi_h},{row.fps:.3f}")
    return "\n".join(lines) + "\n"
