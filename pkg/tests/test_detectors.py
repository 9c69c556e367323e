import numpy as np
import pytest

from stillscan.background import LearningRate
from stillscan.dual_bg import DualBackgroundDetector, validate_rate_pair
from stillscan.geometry import Rect
from stillscan.single_bg import SingleBackgroundDetector

from conftest import make_frame


def flat_scene(count, size=(24, 32), seed=0):
    frames = []
    for i in range(count):
        noise = np.random.default_rng(seed * 7919 + i).integers(-2, 3, size)
        frames.append(make_frame(np.clip(100 + noise, 0, 255), index=i))
    return frames


def scene_with_stopper(count, appear_at, size=(24, 32), pos=(8, 6), obj=(14, 10)):
    rng = np.random.default_rng(23)
    patch = np.clip(185 + rng.integers(-40, 41, (obj[1], obj[0])), 0, 255)
    frames = []
    for i in range(count):
        canvas = np.full(size, 100, dtype=np.int16)
        if i >= appear_at:
            canvas[pos[1] : pos[1] + obj[1], pos[0] : pos[0] + obj[0]] = patch
        noise = np.random.default_rng(7000 + i).integers(-2, 3, size)
        frames.append(make_frame(np.clip(canvas + noise, 0, 255), index=i))
    return frames


def drive(detector, frames):
    """Per-frame candidate snapshots (objects mutate, so copy the fields)."""
    per_frame = []
    prev = None
    for frame in frames:
        candidates = detector.step(frame, prev)
        per_frame.append([
            (c.id, c.consecutive_frames, c.first_seen_frame, tuple(c.bbox))
            for c in candidates
        ])
        prev = frame
    return per_frame


class TestSingleBackgroundDetector:
    def test_empty_scene_never_yields_candidates(self):
        detector = SingleBackgroundDetector(32, 24, stop_threshold_frames=10)
        for candidates in drive(detector, flat_scene(80)):
            assert candidates == []

    def test_candidate_appears_exactly_at_persistence_threshold(self):
        detector = SingleBackgroundDetector(32, 24, stop_threshold_frames=10)
        per_frame = drive(detector, scene_with_stopper(40, appear_at=5))
        first = next(i for i, c in enumerate(per_frame) if c)
        # blob forms at frame 6 (appearance motion masks frame 5), so the
        # 10th consecutive match lands on frame 15
        assert first == 15
        assert all(not c for c in per_frame[:first])
        _, consecutive, first_seen, bbox = per_frame[first][0]
        assert consecutive == 10
        assert first_seen == 6
        assert bbox == (8, 6, 14, 10)

    def test_moving_object_never_becomes_candidate(self):
        # enters at frame 5 and bounces at 4 px/frame, more than 20% of its
        # 14 px width, so rectangle overlap stays below the match threshold
        rng = np.random.default_rng(29)
        patch = np.clip(185 + rng.integers(-40, 41, (10, 14)), 0, 255)
        frames = []
        for i in range(120):
            canvas = np.full((24, 64), 100, dtype=np.int16)
            if i >= 5:
                phase = (4 * (i - 5)) % 88
                x = 2 + (phase if phase <= 44 else 88 - phase)
                canvas[6:16, x : x + 14] = patch
            noise = np.random.default_rng(8000 + i).integers(-2, 3, (24, 64))
            frames.append(make_frame(np.clip(canvas + noise, 0, 255), index=i))
        detector = SingleBackgroundDetector(64, 24, stop_threshold_frames=8)
        for candidates in drive(detector, frames):
            assert candidates == []

    def test_zero_rate_model_yields_no_candidates(self):
        detector = SingleBackgroundDetector(
            32, 24, rate=LearningRate(alpha=0.0), stop_threshold_frames=5
        )
        for candidates in drive(detector, scene_with_stopper(30, appear_at=5)):
            assert candidates == []


class TestDualBackgroundDetector:
    def test_bgdiff_window_opens_and_closes(self):
        detector = DualBackgroundDetector(
            32, 24,
            fast_rate=LearningRate(alpha=0.1),
            slow_rate=LearningRate(alpha=0.01),
            confirm_frames=5,
        )
        frames = scene_with_stopper(300, appear_at=30)
        nonempty = []
        candidate_frames = []
        prev = None
        for frame in frames:
            candidates = detector.step(frame, prev)
            if detector.last_bgdiff.any():
                nonempty.append(frame.frame_index)
            if candidates:
                candidate_frames.append(frame.frame_index)
            prev = frame
        assert nonempty, "BGDIFF never showed the stopped object"
        assert min(nonempty) > 30
        assert max(nonempty) < 299, "slow background never absorbed the object"
        assert candidate_frames and min(candidate_frames) >= min(nonempty) + 4
        assert not any(f < 30 for f in nonempty)

    def test_empty_scene_never_yields_candidates(self):
        detector = DualBackgroundDetector(
            32, 24,
            fast_rate=LearningRate(alpha=0.1),
            slow_rate=LearningRate(alpha=0.01),
            confirm_frames=5,
        )
        for candidates in drive(detector, flat_scene(100)):
            assert candidates == []
            assert not detector.last_bgdiff.any()


class TestRatePairValidation:
    def test_alpha_ordering_required(self):
        with pytest.raises(ValueError, match="alpha_fast > alpha_slow"):
            validate_rate_pair(LearningRate(alpha=0.01), LearningRate(alpha=0.02))
        validate_rate_pair(LearningRate(alpha=0.02), LearningRate(alpha=0.01))

    def test_stride_ordering_when_alphas_equal(self):
        validate_rate_pair(
            LearningRate(alpha=0.02, update_stride=1),
            LearningRate(alpha=0.02, update_stride=10),
        )
        with pytest.raises(ValueError, match="stride_fast < stride_slow"):
            validate_rate_pair(
                LearningRate(alpha=0.02, update_stride=10),
                LearningRate(alpha=0.02, update_stride=10),
            )

    def test_detector_constructor_enforces_ordering(self):
        with pytest.raises(ValueError, match="fast rate"):
            DualBackgroundDetector(
                16, 16,
                fast_rate=LearningRate(alpha=0.002),
                slow_rate=LearningRate(alpha=0.02),
            )
