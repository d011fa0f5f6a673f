import numpy as np
import pytest

from asap_align import synth
from asap_align.profiles import get_profile


@pytest.fixture(scope="session")
def cricket():
    return get_profile("cricket")


@pytest.fixture(scope="session")
def basketball():
    return get_profile("basketball")


@pytest.fixture(scope="session")
def soccer():
    return get_profile("soccer")


@pytest.fixture(scope="session")
def football():
    return get_profile("american_football")


def _cricket_scenario(seed=0, n_events=20, occl_frac=0.0, style="panel",
                      frames_range=(8, 20), jitter=0, **kw):
    tokens = synth.sample_tokens(n_events, seed=seed)
    steps = synth.cricket_steps(tokens, seed=seed, frames_range=frames_range)
    occl = ()
    if occl_frac:
        occl = synth.interior_occlusions(steps, occl_frac, seed=seed, style=style)
    return synth.Scenario(
        sport="cricket", match_id=f"m{seed:03d}", seed=seed, steps=steps,
        occlusions=occl, jitter=jitter, **kw,
    )


@pytest.fixture(scope="session")
def make_cricket_scenario():
    return _cricket_scenario


def flat_field(value, h=16, w=16):
    return np.full((h, w), value, dtype=np.uint8)
