import numpy as np
import pytest

from stillscan.frames import (
    GrayFrame,
    extract_roi,
    open_frame_source,
    read_pgm,
    to_luminance,
    write_pgm,
)
from stillscan.geometry import Rect

from conftest import make_frame


def _write_frames(directory, count, width=6, height=4, ext="pgm"):
    rng = np.random.default_rng(0)
    rasters = []
    for i in range(count):
        pixels = rng.integers(0, 256, size=(height, width)).astype(np.uint8)
        rasters.append(pixels)
        if ext == "pgm":
            write_pgm(directory / f"frame_{i:06d}.pgm", pixels)
        else:
            from PIL import Image

            Image.fromarray(pixels, mode="L").save(directory / f"frame_{i:06d}.png")
    return rasters


class TestGrayFrame:
    def test_rejects_wrong_dtype(self):
        with pytest.raises(ValueError, match="uint8"):
            GrayFrame(np.zeros((4, 4), dtype=np.float64), 0, 0.0)

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError, match="2-D"):
            GrayFrame(np.zeros((4, 4, 3), dtype=np.uint8), 0, 0.0)

    def test_pixels_read_only(self):
        frame = make_frame(np.zeros((4, 4)))
        with pytest.raises(ValueError):
            frame.pixels[0, 0] = 1


class TestPgm:
    def test_round_trip(self, tmp_path):
        pixels = np.arange(24, dtype=np.uint8).reshape(4, 6)
        path = tmp_path / "a.pgm"
        write_pgm(path, pixels)
        assert np.array_equal(read_pgm(path), pixels)

    def test_comment_in_header(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5\n# comment line\n2 2\n255\n" + bytes([1, 2, 3, 4]))
        assert np.array_equal(read_pgm(path), [[1, 2], [3, 4]])

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
        with pytest.raises(ValueError, match="shorter"):
            read_pgm(path)


def test_luminance_uses_rec601_weights():
    rgb = np.zeros((1, 3, 3), dtype=np.uint8)
    rgb[0, 0] = (255, 0, 0)
    rgb[0, 1] = (0, 255, 0)
    rgb[0, 2] = (0, 0, 255)
    assert to_luminance(rgb).tolist() == [[76, 150, 29]]


class TestDirectorySource:
    def test_yields_frames_in_order(self, tmp_path):
        rasters = _write_frames(tmp_path, 10)
        source = open_frame_source(tmp_path, fps=30.0)
        frames = list(source)
        assert [f.frame_index for f in frames] == list(range(10))
        assert frames[3].timestamp_s == pytest.approx(0.1)
        for frame, raster in zip(frames, rasters):
            assert np.array_equal(frame.pixels, raster)

    def test_png_frames(self, tmp_path):
        _write_frames(tmp_path, 3, ext="png")
        assert len(list(open_frame_source(tmp_path, fps=30.0))) == 3

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ValueError, match="no frames"):
            open_frame_source(tmp_path, fps=30.0)

    def test_missing_path(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            open_frame_source(tmp_path / "nope", fps=30.0)

    def test_non_contiguous_indices(self, tmp_path):
        write_pgm(tmp_path / "frame_000000.pgm", np.zeros((2, 2), dtype=np.uint8))
        write_pgm(tmp_path / "frame_000002.pgm", np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(ValueError, match="contiguous"):
            open_frame_source(tmp_path, fps=30.0)

    def test_inconsistent_dimensions(self, tmp_path):
        write_pgm(tmp_path / "frame_000000.pgm", np.zeros((2, 2), dtype=np.uint8))
        write_pgm(tmp_path / "frame_000001.pgm", np.zeros((3, 3), dtype=np.uint8))
        source = open_frame_source(tmp_path, fps=30.0)
        source.next_frame()
        with pytest.raises(ValueError, match="frame_000001"):
            source.next_frame()

    def test_decode_error_names_file(self, tmp_path):
        (tmp_path / "frame_000000.pgm").write_bytes(b"garbage")
        source = open_frame_source(tmp_path, fps=30.0)
        with pytest.raises(ValueError, match="frame_000000.pgm"):
            source.next_frame()

    def test_end_of_stream_repeatable(self, tmp_path):
        _write_frames(tmp_path, 2)
        source = open_frame_source(tmp_path, fps=30.0)
        assert source.next_frame() is not None
        assert source.next_frame() is not None
        assert source.next_frame() is None
        assert source.next_frame() is None


class TestRawSource:
    def test_frame_count_from_length(self, tmp_path):
        path = tmp_path / "frames.raw"
        path.write_bytes(bytes(range(16)) + bytes(range(16)))
        source = open_frame_source(path, fps=30.0, width=4, height=4)
        frames = list(source)
        assert len(frames) == 2
        assert frames[0].pixels[0, 0] == 0
        assert frames[1].frame_index == 1

    def test_length_not_multiple(self, tmp_path):
        path = tmp_path / "frames.raw"
        path.write_bytes(bytes(17))
        with pytest.raises(ValueError, match="multiple"):
            open_frame_source(path, fps=30.0, width=4, height=4)

    def test_requires_dimensions(self, tmp_path):
        path = tmp_path / "frames.raw"
        path.write_bytes(bytes(16))
        with pytest.raises(ValueError, match="width and height"):
            open_frame_source(path, fps=30.0)


class TestExtractRoi:
    def test_full_frame_identity(self):
        frame = make_frame(np.arange(24).reshape(4, 6))
        out = extract_roi(frame, [Rect(0, 0, 6, 4)])
        assert np.array_equal(out.pixels, frame.pixels)
        assert out.frame_index == frame.frame_index
        assert out.timestamp_s == frame.timestamp_s

    def test_widths_add_up(self):
        rng = np.random.default_rng(1)
        frame = make_frame(rng.integers(0, 256, size=(8, 32)))
        out = extract_roi(frame, [Rect(0, 0, 10, 8), Rect(20, 0, 10, 8)])
        assert (out.width, out.height) == (20, 8)

    def test_out_of_bounds_rectangle(self):
        frame = make_frame(np.zeros((8, 8)))
        with pytest.raises(ValueError, match="exceeds frame"):
            extract_roi(frame, [Rect(4, 0, 8, 8)])

    def test_mismatched_heights(self):
        frame = make_frame(np.zeros((8, 8)))
        with pytest.raises(ValueError, match="height"):
            extract_roi(frame, [Rect(0, 0, 4, 8), Rect(4, 0, 4, 6)])

    def test_pure_and_deterministic(self):
        rng = np.random.default_rng(2)
        frame = make_frame(rng.integers(0, 256, size=(10, 10)))
        rois = [Rect(1, 2, 3, 5), Rect(6, 1, 2, 5)]
        a = extract_roi(frame, rois)
        b = extract_roi(frame, rois)
        assert np.array_equal(a.pixels, b.pixels)

    def test_output_pixels_map_to_source_coordinates(self):
        rng = np.random.default_rng(3)
        frame = make_frame(rng.integers(0, 256, size=(12, 16)))
        rois = [Rect(2, 3, 5, 6), Rect(9, 0, 4, 6)]
        out = extract_roi(frame, rois)
        x_offset = 0
        for rect in rois:
            for dy in range(rect.h):
                for dx in range(rect.w):
                    assert (
                        out.pixels[dy, x_offset + dx]
                        == frame.pixels[rect.y + dy, rect.x + dx]
                    )
            x_offset += rect.w
