import numpy as np
import pytest

from stillscan import load_config, run_frames
from stillscan.frames import GrayFrame
from stillscan.scenarios import scenario_path
from stillscan.synth import actor_texture, ground_truth_events, load_script, render_frame

DEFAULT_FPS = 30.0


def make_frame(values, index=0, fps=DEFAULT_FPS) -> GrayFrame:
    pixels = np.asarray(values, dtype=np.uint8)
    return GrayFrame(pixels, index, index / fps)


def render_scenario(name):
    """All frames of a bundled scenario, rendered in memory."""
    script = load_script(scenario_path(name))
    textures = {a.actor_id: actor_texture(a) for a in script.actors}
    frames = [
        GrayFrame(render_frame(script, i, textures), i, i / script.fps)
        for i in range(script.frame_count)
    ]
    return script, frames


@pytest.fixture(scope="session")
def scenario_cache():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = render_scenario(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def pipeline_run(scenario_cache):
    """Run a pipeline over a bundled scenario, caching by (name, pipeline, overrides)."""
    cache = {}

    def get(name, pipeline, overrides=()):
        key = (name, pipeline, tuple(overrides))
        if key not in cache:
            _, frames = scenario_cache(name)
            config = load_config(None, [f"pipeline={pipeline}", *overrides])
            cache[key] = run_frames(config, frames)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def scenario_truth(scenario_cache):
    def get(name):
        script, _ = scenario_cache(name)
        return ground_truth_events(script)

    return get
