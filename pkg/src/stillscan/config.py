"""Run configuration: one JSON document, strictly validated.

Every knob of the pipelines lives here with its default; unknown keys are
rejected and validation errors name the offending key. Command-line overrides
address keys by dotted path (``masks.tau=30``).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

from .background import GmmParams, LearningRate
from .dual_bg import validate_rate_pair
from .geometry import Rect, rect_from_sequence


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key."""


DEFAULTS: dict = {
    "input": {"path": None, "mode": "directory", "width": None, "height": None},
    "fps": 30.0,
    "roi": None,
    "pipeline": "single",
    "gmm": {
        "components": 3,
        "match_sigmas": 2.5,
        "background_fraction": 0.7,
        "initial_variance": 225.0,
        "variance_floor": 4.0,
    },
    "rates": {
        "alpha": 0.002,
        "stride": 1,
        "alpha_fast": 0.02,
        "alpha_slow": 0.002,
        "stride_fast": 1,
        "stride_slow": 10,
        "dual_mode": "learning_rate",
    },
    "masks": {
        "tau": 25.0,
        "tau_motion": 15.0,
        "tau_bgdiff": 25.0,
        "guard_radius": 2,
        "morph_radius": 1,
        "min_area_fraction": 0.001,
    },
    "tracking": {
        "overlap_threshold": 0.8,
        "overlap_mode": "min_area",
        "miss_limit": 5,
        "stop_threshold_frames": 50,
        "confirm_frames": 10,
    },
    "events": {"stop_frames": 50, "park_frames": 150},
    "monitor": {
        "ncc_threshold": 0.90,
        "refresh_interval_s": 30.0,
        "refresh_min_ncc": 0.95,
        "refresh_enabled": True,
        "halo": 4,
        "occlusion_fraction": 0.10,
    },
    "output": {"events": "events.jsonl", "summary_csv": None},
}


@dataclass(frozen=True)
class RunConfig:
    input_path: str | None
    input_mode: str
    input_width: int | None
    input_height: int | None
    fps: float
    roi: tuple[Rect, ...] | None
    pipeline: str
    gmm: GmmParams
    single_rate: LearningRate
    fast_rate: LearningRate
    slow_rate: LearningRate
    tau: float
    tau_motion: float
    tau_bgdiff: float
    guard_radius: int
    morph_radius: int
    min_area_fraction: float
    overlap_threshold: float
    overlap_mode: str
    miss_limit: int
    stop_threshold_frames: int
    confirm_frames: int
    stop_frames: int
    park_frames: int
    ncc_threshold: float
    refresh_interval_s: float
    refresh_min_ncc: float
    refresh_enabled: bool
    halo: int
    occlusion_fraction: float
    events_path: str
    summary_csv: str | None


def _merge(defaults: dict, doc: dict, path: str = "") -> dict:
    merged = copy.deepcopy(defaults)
    for key, value in doc.items():
        here = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown config key: {here}")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{here}: expected an object")
            merged[key] = _merge(defaults[key], value, here)
        else:
            merged[key] = value
    return merged


def _number(doc: dict, key: str, lo=None, hi=None, integer=False):
    value = doc
    for part in key.split("."):
        value = value[part]
    ok_type = (int,) if integer else (int, float)
    if not isinstance(value, ok_type) or isinstance(value, bool):
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"{key}: expected {kind}, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{key}: must be >= {lo}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{key}: must be <= {hi}, got {value}")
    return value


def validate_config(doc: dict) -> RunConfig:
    merged = _merge(DEFAULTS, doc)

    mode = merged["input"]["mode"]
    if mode not in ("directory", "raw"):
        raise ConfigError(f"input.mode: must be 'directory' or 'raw', got {mode!r}")
    pipeline = merged["pipeline"]
    if pipeline not in ("single", "dual"):
        raise ConfigError(f"pipeline: must be 'single' or 'dual', got {pipeline!r}")

    fps = _number(merged, "fps", lo=1e-9)

    roi = None
    if merged["roi"] is not None:
        if not isinstance(merged["roi"], list) or not merged["roi"]:
            raise ConfigError("roi: expected a non-empty list of [x, y, w, h]")
        try:
            rects = tuple(rect_from_sequence(r) for r in merged["roi"])
        except ValueError as exc:
            raise ConfigError(f"roi: {exc}") from exc
        heights = {r.h for r in rects}
        if len(heights) != 1:
            raise ConfigError(f"roi: rectangles must share one height, got {sorted(heights)}")
        roi = rects

    try:
        gmm = GmmParams(
            components=_number(merged, "gmm.components", lo=1, integer=True),
            match_sigmas=_number(merged, "gmm.match_sigmas", lo=1e-9),
            background_fraction=_number(merged, "gmm.background_fraction", lo=1e-9, hi=1.0),
            initial_variance=_number(merged, "gmm.initial_variance", lo=1e-9),
            variance_floor=_number(merged, "gmm.variance_floor", lo=1e-9),
        )
    except ValueError as exc:
        raise ConfigError(f"gmm: {exc}") from exc

    dual_mode = merged["rates"]["dual_mode"]
    if dual_mode not in ("learning_rate", "frame_stride"):
        raise ConfigError(
            f"rates.dual_mode: must be 'learning_rate' or 'frame_stride', got {dual_mode!r}"
        )
    try:
        single_rate = LearningRate(
            alpha=_number(merged, "rates.alpha", lo=0.0, hi=1.0),
            update_stride=_number(merged, "rates.stride", lo=1, integer=True),
        )
        if dual_mode == "learning_rate":
            fast_rate = LearningRate(alpha=_number(merged, "rates.alpha_fast", lo=0.0, hi=1.0))
            slow_rate = LearningRate(alpha=_number(merged, "rates.alpha_slow", lo=0.0, hi=1.0))
        else:
            # Stride mode shares the fast alpha; speed separation comes from
            # how often each model folds a frame in.
            alpha = _number(merged, "rates.alpha_fast", lo=0.0, hi=1.0)
            fast_rate = LearningRate(
                alpha=alpha,
                update_stride=_number(merged, "rates.stride_fast", lo=1, integer=True),
            )
            slow_rate = LearningRate(
                alpha=alpha,
                update_stride=_number(merged, "rates.stride_slow", lo=1, integer=True),
            )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"rates: {exc}") from exc
    try:
        validate_rate_pair(fast_rate, slow_rate)
    except ValueError as exc:
        raise ConfigError(f"rates: {exc}") from exc

    stop_frames = _number(merged, "events.stop_frames", lo=1, integer=True)
    park_frames = _number(merged, "events.park_frames", lo=1, integer=True)
    if park_frames <= stop_frames:
        raise ConfigError(
            f"events.park_frames: must exceed events.stop_frames "
            f"({park_frames} <= {stop_frames})"
        )

    overlap_mode = merged["tracking"]["overlap_mode"]
    if overlap_mode not in ("min_area", "iou"):
        raise ConfigError(
            f"tracking.overlap_mode: must be 'min_area' or 'iou', got {overlap_mode!r}"
        )

    events_path = merged["output"]["events"]
    if not isinstance(events_path, str) or not events_path:
        raise ConfigError("output.events: expected a file path")
    summary_csv = merged["output"]["summary_csv"]
    if summary_csv is not None and not isinstance(summary_csv, str):
        raise ConfigError("output.summary_csv: expected a file path or null")

    width = merged["input"]["width"]
    height = merged["input"]["height"]
    for key, value in (("input.width", width), ("input.height", height)):
        if value is not None and (not isinstance(value, int) or value <= 0):
            raise ConfigError(f"{key}: expected a positive integer or null")

    return RunConfig(
        input_path=merged["input"]["path"],
        input_mode=mode,
        input_width=width,
        input_height=height,
        fps=float(fps),
        roi=roi,
        pipeline=pipeline,
        gmm=gmm,
        single_rate=single_rate,
        fast_rate=fast_rate,
        slow_rate=slow_rate,
        tau=_number(merged, "masks.tau", lo=0.0, hi=255.0),
        tau_motion=_number(merged, "masks.tau_motion", lo=0.0, hi=255.0),
        tau_bgdiff=_number(merged, "masks.tau_bgdiff", lo=0.0, hi=255.0),
        guard_radius=_number(merged, "masks.guard_radius", lo=0, integer=True),
        morph_radius=_number(merged, "masks.morph_radius", lo=1, integer=True),
        min_area_fraction=_number(merged, "masks.min_area_fraction", lo=0.0, hi=1.0),
        overlap_threshold=_number(merged, "tracking.overlap_threshold", lo=1e-9, hi=1.0),
        overlap_mode=overlap_mode,
        miss_limit=_number(merged, "tracking.miss_limit", lo=0, integer=True),
        stop_threshold_frames=_number(merged, "tracking.stop_threshold_frames", lo=1, integer=True),
        confirm_frames=_number(merged, "tracking.confirm_frames", lo=1, integer=True),
        stop_frames=stop_frames,
        park_frames=park_frames,
        ncc_threshold=_number(merged, "monitor.ncc_threshold", lo=-1.0, hi=1.0),
        refresh_interval_s=_number(merged, "monitor.refresh_interval_s", lo=1e-9),
        refresh_min_ncc=_number(merged, "monitor.refresh_min_ncc", lo=-1.0, hi=1.0),
        refresh_enabled=bool(merged["monitor"]["refresh_enabled"]),
        halo=_number(merged, "monitor.halo", lo=0, integer=True),
        occlusion_fraction=_number(merged, "monitor.occlusion_fraction", lo=0.0, hi=1.0),
        events_path=events_path,
        summary_csv=summary_csv,
    )


def apply_override(doc: dict, assignment: str) -> None:
    """Apply one ``dotted.path=value`` override in place; values parse as JSON
    with a bare-string fallback."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = key.split(".")
    node = doc
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {key!r}: {part} is not an object")
    node[parts[-1]] = value


def load_config(path: str | Path | None, overrides: list[str] = ()) -> RunConfig:
    """Load, override and validate a configuration document."""
    if path is None:
        doc: dict = {}
    else:
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    for assignment in overrides:
        apply_override(doc, assignment)
    return validate_config(doc)
