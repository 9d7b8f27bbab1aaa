import random

import pytest
from hypothesis import given, strategies as st

from robothumb.control import (CalibrationSet, ControlParams,
                               calibrate_from_trace, horizontal_update,
                               linear_map, load_calibration, save_calibration,
                               validate_calibration_ranges, vertical_update)
from robothumb.errors import (CalibrationIncompleteError, ConfigurationError,
                              DegenerateCalibrationError)
from robothumb.kinematics import FingerGeometry
from robothumb.plant import MotorAxis
from robothumb.sensors import SensorSample, SensorTrace

PARAMS = ControlParams()

CAL = CalibrationSet(flex_min=2482, flex_max=1780, enc_h_min=790, enc_h_max=-795,
                     y_min=1229, y_max=1332, z_min=1474, z_max=1720,
                     enc_hover=0, enc_pressed=558)

ANCHORS = {"enc_h_min": 790, "enc_h_max": -795, "enc_hover": 0, "enc_pressed": 558}


def make_trace(rows):
    """rows: (flex, y, z, label) tuples at 1 ms spacing."""
    samples = tuple(SensorSample(float(i), f, y, z, label)
                    for i, (f, y, z, label) in enumerate(rows))
    return SensorTrace(samples=samples, sample_period=1.0)


def full_calibration_rows(flex_values=(1000, 1002)):
    rows = []
    for v in flex_values:
        rows.append((v, 1229, 1474, "flex_min"))
    rows.append((3000, 1229, 1474, "flex_max"))
    rows.append((500, 1229, 1474, "foot_down"))
    rows.append((500, 1332, 1474, "foot_up"))
    rows.append((500, 1229, 1474, "z_rest"))
    rows.append((500, 1229, 1720, "z_active"))
    return rows


def test_linear_map_endpoints_and_midpoint():
    assert linear_map(0, 0, 100, -50, 50) == -50
    assert linear_map(100, 0, 100, -50, 50) == 50
    assert linear_map(50, 0, 100, -50, 50) == 0
    # anchors may be in either order
    assert linear_map(2482, 2482, 1780, 790, -795) == 790
    assert linear_map(1780, 2482, 1780, 790, -795) == -795


def test_linear_map_clamps_outside_anchors():
    assert linear_map(-10, 0, 100, 0, 1000) == 0
    assert linear_map(110, 0, 100, 0, 1000) == 1000
    assert linear_map(5000, 2482, 1780, 790, -795) == 790


def test_linear_map_degenerate_rejected():
    with pytest.raises(DegenerateCalibrationError):
        linear_map(1, 5, 5, 0, 10)


def test_calibrate_means_and_rounding():
    calib = calibrate_from_trace(make_trace(full_calibration_rows()), ANCHORS)
    assert calib.flex_min == 1001  # mean of 1000, 1002
    assert calib.flex_max == 3000
    assert calib.y_min == 1229
    assert calib.y_max == 1332
    assert calib.z_min == 1474
    assert calib.z_max == 1720
    assert calib.enc_pressed == 558


def test_calibrate_missing_label_names_it():
    rows = [r for r in full_calibration_rows() if r[3] != "foot_up"]
    with pytest.raises(CalibrationIncompleteError, match="foot_up"):
        calibrate_from_trace(make_trace(rows), ANCHORS)


def test_calibrate_missing_anchor_names_it():
    anchors = {k: v for k, v in ANCHORS.items() if k != "enc_pressed"}
    with pytest.raises(CalibrationIncompleteError, match="enc_pressed"):
        calibrate_from_trace(make_trace(full_calibration_rows()), anchors)


def test_calibrate_single_samples_identity():
    calib = calibrate_from_trace(make_trace(full_calibration_rows((1000,))), ANCHORS)
    assert calib.flex_min == 1000


def test_degenerate_calibration_rejected():
    with pytest.raises(DegenerateCalibrationError):
        CalibrationSet(flex_min=5, flex_max=5, enc_h_min=0, enc_h_max=1,
                       y_min=0, y_max=1, z_min=0, z_max=1,
                       enc_hover=0, enc_pressed=1)


def test_horizontal_update_endpoints_and_velocity_law():
    cmd = horizontal_update(CAL.flex_min, CAL, PARAMS, current_counts=0)
    assert cmd.setpoint == CAL.enc_h_min
    cmd = horizontal_update(CAL.flex_max, CAL, PARAMS, current_counts=0)
    assert cmd.setpoint == CAL.enc_h_max
    # converged: zero distance, zero commanded velocity
    cmd = horizontal_update(CAL.flex_min, CAL, PARAMS, current_counts=CAL.enc_h_min)
    assert cmd.velocity_limit == 0.0
    # proportional law below the cap
    params = ControlParams(kp_h=0.05, v_cap=90.0)
    cmd = horizontal_update(CAL.flex_min, CAL, params,
                            current_counts=CAL.enc_h_min - 1000)
    assert cmd.velocity_limit == pytest.approx(50.0)


def test_vertical_update_endpoints_and_velocity_clamp():
    cmd = vertical_update(CAL.y_min, CAL.z_min, CAL, PARAMS)
    assert cmd.setpoint == CAL.enc_hover
    assert cmd.velocity_limit == PARAMS.v_floor
    cmd = vertical_update(CAL.y_max, CAL.z_max, CAL, PARAMS)
    assert cmd.setpoint == CAL.enc_pressed
    assert cmd.velocity_limit == min(PARAMS.kv_z, PARAMS.v_cap)
    big = ControlParams(kv_z=10000.0)
    cmd = vertical_update(CAL.y_max, CAL.z_max, CAL, big)
    assert cmd.velocity_limit == big.v_cap


@given(st.integers(min_value=-10000, max_value=10000))
def test_horizontal_setpoint_always_clamped(flex):
    cmd = horizontal_update(flex, CAL, PARAMS, 0)
    lo, hi = sorted((CAL.enc_h_min, CAL.enc_h_max))
    assert lo <= cmd.setpoint <= hi


@given(st.integers(min_value=-10000, max_value=10000),
       st.integers(min_value=-10000, max_value=10000))
def test_vertical_setpoint_clamped_and_velocity_bounded(y, z):
    cmd = vertical_update(y, z, CAL, PARAMS)
    lo, hi = sorted((CAL.enc_hover, CAL.enc_pressed))
    assert lo <= cmd.setpoint <= hi
    assert PARAMS.v_floor <= cmd.velocity_limit <= PARAMS.v_cap


def test_setpoints_monotone_in_sensor_codes():
    h_prev = None
    for flex in range(1700, 2600, 25):
        sp = horizontal_update(flex, CAL, PARAMS, 0).setpoint
        if h_prev is not None:
            # codes toward flex_min (2482) map toward enc_h_min (790): rising
            assert sp >= h_prev
        h_prev = sp
    v_prev = None
    for y in range(1200, 1360, 5):
        sp = vertical_update(y, CAL.z_min, CAL, PARAMS).setpoint
        if v_prev is not None:
            assert sp >= v_prev
        v_prev = sp


def test_proportional_velocity_non_decreasing_in_distance():
    prev = -1.0
    for dist in range(0, 3000, 50):
        cmd = horizontal_update(CAL.flex_min, CAL, PARAMS,
                                current_counts=CAL.enc_h_min - dist)
        assert cmd.velocity_limit >= prev
        assert cmd.velocity_limit <= PARAMS.v_cap
        prev = cmd.velocity_limit


def test_endpoint_exactness_over_random_calibrations():
    rng = random.Random(42)
    for _ in range(300):
        s_min = rng.randint(0, 4000)
        s_max = rng.randint(0, 4000)
        p_min = rng.randint(-16000, 16000)
        p_max = rng.randint(-16000, 16000)
        if s_min == s_max:
            continue
        assert linear_map(s_min, s_min, s_max, p_min, p_max) == p_min
        assert linear_map(s_max, s_min, s_max, p_min, p_max) == p_max
        mid = linear_map((s_min + s_max) / 2.0, s_min, s_max, p_min, p_max)
        assert abs(mid - (p_min + p_max) / 2.0) <= 1.0


def test_calibration_file_round_trip(tmp_path):
    path = tmp_path / "calibration.txt"
    save_calibration(CAL, path)
    assert load_calibration(path) == CAL
    text = path.read_text()
    assert "flex_min = 2482" in text


def test_validate_calibration_ranges():
    validate_calibration_ranges(CAL, FingerGeometry(), MotorAxis())
    too_deep = CalibrationSet(flex_min=2482, flex_max=1780, enc_h_min=790,
                              enc_h_max=-795, y_min=1229, y_max=1332,
                              z_min=1474, z_max=1720, enc_hover=0,
                              enc_pressed=9000)  # ~198 deg, past the joint stop
    with pytest.raises(ConfigurationError, match="enc_pressed"):
        validate_calibration_ranges(too_deep, FingerGeometry(), MotorAxis())


def test_control_params_validation():
    with pytest.raises(ConfigurationError):
        ControlParams(kp_h=0.0)
    with pytest.raises(ConfigurationError):
        ControlParams(v_floor=0.0)
    with pytest.raises(ConfigurationError):
        ControlParams(v_floor=500.0, v_cap=400.0)
