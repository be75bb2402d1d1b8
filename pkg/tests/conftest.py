import json
import math

import pytest
from click.testing import CliRunner

from larmor_clock.profiles import PiecewiseBarrier, gaussian, rectangular
from larmor_clock.validation import random_barrier_family


@pytest.fixture(scope = "function")
def rect_barrier():
    # U0 = 1, d = 1: the reference rectangular barrier
    return rectangular(1.0, 1.0).as_piecewise()


@pytest.fixture(scope = "function")
def two_step_barrier():
    return PiecewiseBarrier(((1.0, 0.5), (1.0, 1.0)))


@pytest.fixture(scope = "function")
def free_barrier():
    return PiecewiseBarrier(((2.0, 0.0),))


@pytest.fixture(scope = "function")
def gaussian_profile():
    return gaussian(1.0, 1.0, samples = 20001)


@pytest.fixture(scope = "session")
def barrier_family():
    return random_barrier_family(12, seed = 7)


@pytest.fixture(scope = "function")
def scenario_data():
    return {
        "particle": {"E": 1.2, "m": 1.0},
        "field": {"V": 1e-6},
        "barrier": {"kind": "rectangular", "U0": 1.0, "d": 1.0},
        "spin": {"theta": math.pi / 2, "phi": 0.0},
        "numerics": {"n_segments": 64},
    }


@pytest.fixture(scope = "function")
def config_file(tmp_path, scenario_data):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario_data))
    return path


@pytest.fixture(scope = "function")
def write_config(tmp_path):
    def write(data, name = "custom.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path
    return write


@pytest.fixture(scope = "function")
def runner():
    try:
        return CliRunner(mix_stderr = False)
    except TypeError:
        # click 8.2 dropped the flag and always keeps stderr apart
        return CliRunner()
