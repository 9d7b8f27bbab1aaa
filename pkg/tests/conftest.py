import pytest

from robothumb import default_config, synth
from robothumb.control import calibrate_from_trace


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def calib(cfg):
    trace = synth.calibration_trace(cfg)
    return calibrate_from_trace(trace, synth.anchors_from_config(cfg))
