import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sweepdepth.synth import make_sequence, preset_scene


@pytest.fixture(scope="session")
def rendered_presets():
    """Frames for each bundled scene, rendered once per test session."""
    out = {}
    for name in ("static_lateral", "static_forward", "moving_box", "static_camera"):
        setup = preset_scene(name)
        out[name] = (setup, make_sequence(setup.scene, setup.poses, setup.K))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
