"""Deterministic synthetic street scenes with ground-truth incident logs.

A scene script places textured rectangular actors on a flat or gradient
background and moves them along waypoint schedules; optional global
illumination ramps and seeded sensor noise exercise the detectors' robustness
paths. Identical scripts render bit-identical frames, and every actor's
static/occluded/removed intervals are written alongside the frames.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .frames import write_pgm
from .geometry import Rect


class ScriptError(ValueError):
    """Scene-script validation failure; `path` names the offending JSON node."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class Actor:
    actor_id: int
    width: int
    height: int
    base_tone: int
    texture_amplitude: int
    texture_seed: int
    waypoints: tuple[tuple[int, tuple[int, int]], ...]  # (frame, (x, y))
    removal_frame: int | None = None


@dataclass(frozen=True)
class IlluminationRamp:
    start_frame: int
    end_frame: int
    gain: float
    offset: float


@dataclass(frozen=True)
class SceneScript:
    width: int
    height: int
    frame_count: int
    fps: float
    background_kind: str  # flat | gradient
    background_levels: tuple[int, int]
    noise_amplitude: int
    noise_seed: int
    actors: tuple[Actor, ...] = ()
    illumination: IlluminationRamp | None = None


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ScriptError(f"{path}.{key}", "missing required key")
    return obj[key]


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ScriptError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ScriptError(path, f"must be >= {minimum}, got {value}")
    return value


def _parse_actor(obj: dict, path: str, scene_w: int, scene_h: int,
                 frame_count: int) -> Actor:
    actor_id = _as_int(_require(obj, "id", path), f"{path}.id", 0)
    size = _require(obj, "size", path)
    if not (isinstance(size, list) and len(size) == 2):
        raise ScriptError(f"{path}.size", "expected [width, height]")
    width = _as_int(size[0], f"{path}.size[0]", 1)
    height = _as_int(size[1], f"{path}.size[1]", 1)
    tone = _as_int(obj.get("base_tone", 160), f"{path}.base_tone", 0)
    amp = _as_int(obj.get("texture_amplitude", 40), f"{path}.texture_amplitude", 1)
    seed = _as_int(_require(obj, "texture_seed", path), f"{path}.texture_seed", 0)
    raw_wps = _require(obj, "waypoints", path)
    if not (isinstance(raw_wps, list) and raw_wps):
        raise ScriptError(f"{path}.waypoints", "expected a non-empty list")
    waypoints = []
    prev_frame = -1
    for i, wp in enumerate(raw_wps):
        wp_path = f"{path}.waypoints[{i}]"
        if not (isinstance(wp, list) and len(wp) == 2
                and isinstance(wp[1], list) and len(wp[1]) == 2):
            raise ScriptError(wp_path, "expected [frame, [x, y]]")
        frame = _as_int(wp[0], f"{wp_path}[0]", 0)
        x = _as_int(wp[1][0], f"{wp_path}[1][0]")
        y = _as_int(wp[1][1], f"{wp_path}[1][1]")
        if frame <= prev_frame:
            raise ScriptError(wp_path, "waypoint frames must strictly increase")
        if frame >= frame_count:
            raise ScriptError(wp_path, f"frame {frame} beyond scene end {frame_count}")
        if not (0 <= x and x + width <= scene_w and 0 <= y and y + height <= scene_h):
            raise ScriptError(wp_path, f"actor at ({x}, {y}) leaves the frame")
        prev_frame = frame
        waypoints.append((frame, (x, y)))
    removal = obj.get("removal_frame")
    if removal is not None:
        removal = _as_int(removal, f"{path}.removal_frame", 1)
        if removal <= waypoints[0][0]:
            raise ScriptError(f"{path}.removal_frame",
                              "removal must come after the first waypoint")
    return Actor(actor_id, width, height, tone, amp, seed,
                 tuple(waypoints), removal)


def parse_script(doc: dict) -> SceneScript:
    """Validate a scene-script JSON document."""
    if not isinstance(doc, dict):
        raise ScriptError("$", "script root must be an object")
    width = _as_int(_require(doc, "width", "$"), "$.width", 8)
    height = _as_int(_require(doc, "height", "$"), "$.height", 8)
    frame_count = _as_int(_require(doc, "frames", "$"), "$.frames", 1)
    fps = _require(doc, "fps", "$")
    if not isinstance(fps, (int, float)) or fps <= 0:
        raise ScriptError("$.fps", f"must be a positive number, got {fps!r}")

    bg = doc.get("background", {"kind": "flat", "level": 100})
    kind = bg.get("kind", "flat")
    if kind == "flat":
        level = _as_int(bg.get("level", 100), "$.background.level", 0)
        levels = (level, level)
    elif kind == "gradient":
        levels = (_as_int(_require(bg, "start", "$.background"), "$.background.start", 0),
                  _as_int(_require(bg, "end", "$.background"), "$.background.end", 0))
    else:
        raise ScriptError("$.background.kind", f"unknown kind {kind!r}")

    noise = doc.get("noise", {"amplitude": 0, "seed": 0})
    noise_amp = _as_int(noise.get("amplitude", 0), "$.noise.amplitude", 0)
    noise_seed = _as_int(noise.get("seed", 0), "$.noise.seed", 0)

    illum = None
    if "illumination" in doc and doc["illumination"] is not None:
        ramp = doc["illumination"]
        start = _as_int(_require(ramp, "start_frame", "$.illumination"),
                        "$.illumination.start_frame", 0)
        end = _as_int(_require(ramp, "end_frame", "$.illumination"),
                      "$.illumination.end_frame", 0)
        if end <= start:
            raise ScriptError("$.illumination.end_frame", "must exceed start_frame")
        gain = float(ramp.get("gain", 1.0))
        offset = float(ramp.get("offset", 0.0))
        illum = IlluminationRamp(start, end, gain, offset)

    actors = []
    ids = set()
    for i, actor_doc in enumerate(doc.get("actors", [])):
        actor = _parse_actor(actor_doc, f"$.actors[{i}]", width, height, frame_count)
        if actor.actor_id in ids:
            raise ScriptError(f"$.actors[{i}].id", f"duplicate id {actor.actor_id}")
        ids.add(actor.actor_id)
        actors.append(actor)

    known = {"width", "height", "frames", "fps", "background", "noise",
             "illumination", "actors"}
    for key in doc:
        if key not in known:
            raise ScriptError(f"$.{key}", "unknown key")
    return SceneScript(width, height, frame_count, float(fps), kind, levels,
                       noise_amp, noise_seed, tuple(actors), illum)


def load_script(path: str | Path) -> SceneScript:
    with open(path) as fh:
        return parse_script(json.load(fh))


def actor_texture(actor: Actor) -> np.ndarray:
    """Seeded speckle pattern; non-constant so NCC is always defined on it."""
    rng = np.random.default_rng(actor.texture_seed)
    speckle = rng.integers(-actor.texture_amplitude, actor.texture_amplitude + 1,
                           size=(actor.height, actor.width))
    return np.clip(actor.base_tone + speckle, 0, 255).astype(np.float64)


def actor_position(actor: Actor, frame_index: int) -> tuple[int, int] | None:
    """Interpolated (x, y) at frame_index, or None when not on screen.

    Actors appear at their first waypoint, hold their last waypoint position,
    and vanish at removal_frame.
    """
    if frame_index < actor.waypoints[0][0]:
        return None
    if actor.removal_frame is not None and frame_index >= actor.removal_frame:
        return None
    prev_f, prev_pos = actor.waypoints[0]
    for f, pos in actor.waypoints:
        if frame_index == f:
            return pos
        if frame_index < f:
            t = (frame_index - prev_f) / (f - prev_f)
            return (round(prev_pos[0] + t * (pos[0] - prev_pos[0])),
                    round(prev_pos[1] + t * (pos[1] - prev_pos[1])))
        prev_f, prev_pos = f, pos
    return prev_pos


def _background_raster(script: SceneScript) -> np.ndarray:
    lo, hi = script.background_levels
    if script.background_kind == "flat":
        return np.full((script.height, script.width), float(lo))
    ramp = np.linspace(lo, hi, script.width)
    return np.tile(ramp, (script.height, 1))


def _illumination_at(ramp: IlluminationRamp | None, frame_index: int) -> tuple[float, float]:
    if ramp is None or frame_index <= ramp.start_frame:
        return 1.0, 0.0
    span = ramp.end_frame - ramp.start_frame
    t = min(1.0, (frame_index - ramp.start_frame) / span)
    return 1.0 + t * (ramp.gain - 1.0), t * ramp.offset


def render_frame(script: SceneScript, frame_index: int,
                 textures: dict[int, np.ndarray] | None = None) -> np.ndarray:
    """Render one frame of the scene as a uint8 raster."""
    if textures is None:
        textures = {a.actor_id: actor_texture(a) for a in script.actors}
    canvas = _background_raster(script).copy()
    for actor in script.actors:
        pos = actor_position(actor, frame_index)
        if pos is None:
            continue
        x, y = pos
        canvas[y : y + actor.height, x : x + actor.width] = textures[actor.actor_id]
    gain, offset = _illumination_at(script.illumination, frame_index)
    if gain != 1.0 or offset != 0.0:
        canvas = np.clip(gain * canvas + offset, 0.0, 255.0)
    if script.noise_amplitude > 0:
        rng = np.random.default_rng(
            (script.noise_seed + 1) * 1_000_003 + frame_index
        )
        noise = rng.integers(-script.noise_amplitude, script.noise_amplitude + 1,
                             size=canvas.shape)
        canvas = canvas + noise
    return np.clip(np.rint(canvas), 0, 255).astype(np.uint8)


def ground_truth_events(script: SceneScript) -> list[dict]:
    """Static, occlusion and removal intervals implied by the script."""
    events: list[dict] = []
    for actor in script.actors:
        end_frame = script.frame_count - 1
        if actor.removal_frame is not None:
            end_frame = min(end_frame, actor.removal_frame - 1)
        # Static runs: maximal stretches of consecutive same-position waypoints.
        run_start = None
        run_pos = None
        wps = list(actor.waypoints) + [(None, None)]
        for i in range(len(wps) - 1):
            frame, pos = wps[i]
            nxt_frame, nxt_pos = wps[i + 1]
            if nxt_pos == pos and nxt_frame is not None:
                if run_start is None:
                    run_start, run_pos = frame, pos
                continue
            if run_start is not None:
                run_end = min(frame, end_frame)
                _append_interval(events, script, actor, run_start, run_end, run_pos)
                run_start, run_pos = None, None
        if run_start is not None:
            _append_interval(events, script, actor, run_start, end_frame, run_pos)
        if actor.removal_frame is not None and actor.removal_frame < script.frame_count:
            pos = actor_position(actor, actor.removal_frame - 1)
            events.append(_gt_event(script, "removed", actor, actor.removal_frame,
                                    pos, 0.0))
    events.extend(_occlusion_events(script))
    events.sort(key=lambda e: (e["frame_index"], e["object_id"], e["event_type"]))
    return events


def _append_interval(events, script, actor, start, end, pos):
    duration = (end - start) / script.fps
    events.append(_gt_event(script, "static_begin", actor, start, pos, 0.0))
    events.append(_gt_event(script, "static_end", actor, end, pos, duration))


def _gt_event(script, event_type, actor, frame, pos, duration_s) -> dict:
    x, y = pos if pos is not None else (0, 0)
    return {
        "event_type": event_type,
        "object_id": actor.actor_id,
        "frame_index": frame,
        "timestamp_s": frame / script.fps,
        "bbox": [x, y, actor.width, actor.height],
        "gamma": None,
        "duration_s": duration_s,
    }


def _occlusion_events(script: SceneScript) -> list[dict]:
    """Mark frames where another actor's rectangle overlaps a static actor."""
    events = []
    for actor in script.actors:
        static_frames = _static_frame_set(actor, script.frame_count)
        if not static_frames:
            continue
        occluded: list[int] = []
        for f in sorted(static_frames):
            pos = actor_position(actor, f)
            if pos is None:
                continue
            rect = Rect(pos[0], pos[1], actor.width, actor.height)
            hit = False
            for other in script.actors:
                if other.actor_id == actor.actor_id:
                    continue
                opos = actor_position(other, f)
                if opos is None:
                    continue
                orect = Rect(opos[0], opos[1], other.width, other.height)
                if rect.intersection(orect) is not None:
                    hit = True
                    break
            if hit:
                occluded.append(f)
        for start, end in _runs(occluded):
            pos = actor_position(actor, start)
            events.append(_gt_event(script, "occluded_begin", actor, start, pos, 0.0))
            events.append(_gt_event(script, "occluded_end", actor, end, pos,
                                    (end - start) / script.fps))
    return events


def _static_frame_set(actor: Actor, frame_count: int) -> set[int]:
    frames: set[int] = set()
    end_frame = frame_count - 1
    if actor.removal_frame is not None:
        end_frame = min(end_frame, actor.removal_frame - 1)
    wps = list(actor.waypoints)
    for (f0, p0), (f1, p1) in zip(wps, wps[1:]):
        if p0 == p1:
            frames.update(range(f0, min(f1, end_frame) + 1))
    if wps and wps[-1][0] <= end_frame:
        # Position held after the last waypoint counts as static.
        frames.update(range(wps[-1][0], end_frame + 1))
    return frames


def _runs(sorted_frames: list[int]) -> list[tuple[int, int]]:
    runs = []
    for f in sorted_frames:
        if runs and f == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], f)
        else:
            runs.append((f, f))
    return runs


def render(script: SceneScript, out_dir: str | Path, overwrite: bool = False) -> Path:
    """Write the frame sequence and ground-truth log; returns the output dir."""
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not overwrite:
        raise FileExistsError(f"{out} is not empty; pass overwrite to replace it")
    out.mkdir(parents=True, exist_ok=True)
    textures = {a.actor_id: actor_texture(a) for a in script.actors}
    for i in range(script.frame_count):
        write_pgm(out / f"frame_{i:06d}.pgm", render_frame(script, i, textures))
    gt_path = out / "ground_truth.jsonl"
    with open(gt_path, "w") as fh:
        for event in ground_truth_events(script):
            fh.write(json.dumps(event) + "\n")
    return out
