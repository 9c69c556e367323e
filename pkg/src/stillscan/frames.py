"""Grayscale frame loading, ROI extraction and frame sequencing.

Supported inputs are a directory of numbered rasters (``frame_%06d.pgm`` or
``.png``) or a single headerless 8-bit raw file whose dimensions come from the
run configuration. Container video is out of scope; convert upstream with e.g.
``ffmpeg -i in.mp4 frames/frame_%06d.pgm``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Rect

FRAME_NAME_RE = re.compile(r"^frame_(\d{6})\.(pgm|png)$")

# Rec. 601 luminance weights for color inputs.
_LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True, eq=False)
class GrayFrame:
    """An 8-bit grayscale frame with its position on the source timeline."""

    pixels: np.ndarray
    frame_index: int
    timestamp_s: float

    def __post_init__(self):
        if self.pixels.ndim != 2:
            raise ValueError(f"frame pixels must be 2-D, got shape {self.pixels.shape}")
        if self.pixels.dtype != np.uint8:
            raise ValueError(f"frame pixels must be uint8, got {self.pixels.dtype}")
        if self.pixels.size == 0:
            raise ValueError("frame has zero pixels")
        if self.frame_index < 0:
            raise ValueError(f"frame_index must be >= 0, got {self.frame_index}")
        self.pixels.setflags(write=False)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def to_luminance(raster: np.ndarray) -> np.ndarray:
    """Collapse an (H, W) or (H, W, C) raster to 8-bit luminance."""
    if raster.ndim == 2:
        return raster.astype(np.uint8)
    if raster.ndim == 3 and raster.shape[2] in (3, 4):
        rgb = raster[:, :, :3].astype(np.float64)
        luma = rgb @ _LUMA_WEIGHTS
        return np.clip(np.rint(luma), 0, 255).astype(np.uint8)
    raise ValueError(f"unsupported raster shape {raster.shape}")


def read_pgm(path: Path) -> np.ndarray:
    """Read a binary (P5) PGM with maxval 255."""
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM (missing P5 magic)")
    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # each optionally preceded by '#' comment lines.
    pos = 2
    tokens: list[int] = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        tokens.append(int(data[start:pos]))
    pos += 1  # single whitespace byte after maxval
    width, height, maxval = tokens
    if maxval != 255:
        raise ValueError(f"{path}: unsupported PGM maxval {maxval}")
    expected = width * height
    raster = np.frombuffer(data, dtype=np.uint8, offset=pos)
    if raster.size < expected:
        raise ValueError(f"{path}: PGM payload shorter than {width}x{height}")
    return raster[:expected].reshape(height, width).copy()


def write_pgm(path: Path, pixels: np.ndarray) -> None:
    if pixels.ndim != 2 or pixels.dtype != np.uint8:
        raise ValueError("write_pgm expects a 2-D uint8 array")
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii")
    path.write_bytes(header + pixels.tobytes())


def _read_raster(path: Path) -> np.ndarray:
    if path.suffix == ".pgm":
        return read_pgm(path)
    if path.suffix == ".png":
        from PIL import Image, UnidentifiedImageError

        try:
            with Image.open(path) as img:
                return to_luminance(np.asarray(img))
        except UnidentifiedImageError as exc:
            raise ValueError(f"{path}: cannot decode PNG: {exc}") from exc
    raise ValueError(f"{path}: unsupported raster extension")


class FrameSource:
    """Ordered iterator over GrayFrames; `next_frame` returns None when done."""

    fps: float

    def next_frame(self) -> GrayFrame | None:
        raise NotImplementedError

    def __iter__(self):
        while True:
            frame = self.next_frame()
            if frame is None:
                return
            yield frame


class DirectoryFrameSource(FrameSource):
    """Frames from `frame_%06d.pgm` / `.png` files, indices contiguous from 0."""

    def __init__(self, directory: Path, fps: float):
        self.fps = fps
        self._files: list[Path] = []
        indices = []
        for entry in sorted(directory.iterdir()):
            m = FRAME_NAME_RE.match(entry.name)
            if m:
                indices.append(int(m.group(1)))
                self._files.append(entry)
        if not self._files:
            raise ValueError(f"{directory}: no frames (expected frame_000000.pgm/.png)")
        if indices != list(range(len(indices))):
            raise ValueError(f"{directory}: frame indices are not contiguous from 0")
        self._pos = 0
        self._shape: tuple[int, int] | None = None

    def next_frame(self) -> GrayFrame | None:
        if self._pos >= len(self._files):
            return None
        path = self._files[self._pos]
        try:
            raster = _read_raster(path)
        except ValueError:
            raise
        except Exception as exc:
            raise ValueError(f"{path}: decode failure: {exc}") from exc
        if self._shape is None:
            self._shape = raster.shape
        elif raster.shape != self._shape:
            raise ValueError(
                f"{path}: frame dimensions {raster.shape[::-1]} differ from "
                f"first frame {self._shape[::-1]}"
            )
        index = self._pos
        self._pos += 1
        return GrayFrame(raster, index, index / self.fps)


class RawFrameSource(FrameSource):
    """Frames from one headerless file of concatenated 8-bit planar rasters."""

    def __init__(self, path: Path, fps: float, width: int, height: int):
        self.fps = fps
        self._width = width
        self._height = height
        size = path.stat().st_size
        frame_bytes = width * height
        if frame_bytes <= 0:
            raise ValueError("raw mode needs positive width and height")
        if size == 0:
            raise ValueError(f"{path}: no frames (empty raw file)")
        if size % frame_bytes != 0:
            raise ValueError(
                f"{path}: size {size} is not a multiple of {width}x{height}"
            )
        self._count = size // frame_bytes
        self._data = np.fromfile(path, dtype=np.uint8)
        self._pos = 0

    def next_frame(self) -> GrayFrame | None:
        if self._pos >= self._count:
            return None
        n = self._width * self._height
        raster = self._data[self._pos * n : (self._pos + 1) * n].reshape(
            self._height, self._width
        ).copy()
        index = self._pos
        self._pos += 1
        return GrayFrame(raster, index, index / self.fps)


def open_frame_source(
    path: str | Path,
    fps: float,
    width: int | None = None,
    height: int | None = None,
) -> FrameSource:
    """Open a frame directory, or a raw file when width/height are given."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"input path does not exist: {p}")
    if p.is_dir():
        return DirectoryFrameSource(p, fps)
    if width is None or height is None:
        raise ValueError("raw input needs explicit width and height")
    return RawFrameSource(p, fps, width, height)


def validate_roi(rois: list[Rect], frame_width: int, frame_height: int) -> None:
    """Check ROI rectangles fit the frame and share one height."""
    if not rois:
        raise ValueError("ROI list is empty")
    heights = {r.h for r in rois}
    if len(heights) != 1:
        raise ValueError(f"ROI rectangles must share one height, got {sorted(heights)}")
    frame = Rect(0, 0, frame_width, frame_height)
    for i, r in enumerate(rois):
        if not frame.contains_rect(r):
            raise ValueError(
                f"ROI rectangle {i} {tuple(r)} exceeds frame {frame_width}x{frame_height}"
            )


def extract_roi(frame: GrayFrame, rois: list[Rect]) -> GrayFrame:
    """Crop the ROI rectangles and concatenate them left to right.

    All rectangles must share one height; the output keeps the source frame's
    index and timestamp.
    """
    validate_roi(rois, frame.width, frame.height)
    strips = [frame.pixels[r.y : r.y2, r.x : r.x2] for r in rois]
    return GrayFrame(
        np.ascontiguousarray(np.hstack(strips)),
        frame.frame_index,
        frame.timestamp_s,
    )
