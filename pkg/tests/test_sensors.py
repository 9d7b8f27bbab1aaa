import numpy as np
import pytest
from hypothesis import given, strategies as st

from robothumb.errors import InputError, TraceFormatError
from robothumb.sensors import (AccelerometerModel, DividerConfig,
                               FlexSensorModel, SensorSample, SensorTrace,
                               accel_output, adc_quantize, divider_voltage,
                               flex_resistance, load_trace, save_trace)

FLEX = FlexSensorModel()
DIV = DividerConfig()
ACC = AccelerometerModel()


def test_flex_resistance_endpoints_and_midpoint():
    assert flex_resistance(0.0, FLEX) == pytest.approx(13.0)
    assert flex_resistance(180.0, FLEX) == pytest.approx(26.0)
    assert flex_resistance(90.0, FLEX) == pytest.approx(19.5)


def test_flex_resistance_rejects_out_of_range():
    with pytest.raises(InputError):
        flex_resistance(-1.0, FLEX)
    with pytest.raises(InputError):
        flex_resistance(180.1, FLEX)


def test_divider_voltage_values():
    assert divider_voltage(20.0, DIV) == pytest.approx(2.5)
    assert divider_voltage(13.0, DIV) == pytest.approx(100.0 / 33.0, abs=1e-4)
    assert divider_voltage(26.0, DIV) == pytest.approx(100.0 / 46.0, abs=1e-4)
    with pytest.raises(InputError):
        divider_voltage(0.0, DIV)


def test_adc_quantize_values():
    assert adc_quantize(0.0, DIV) == 0
    assert adc_quantize(5.0, DIV) == 4095
    # 2.5/5*4095 = 2047.5, half rounds up
    assert adc_quantize(2.5, DIV) == 2048
    assert adc_quantize(100.0, DIV) == 4095  # clamps
    assert adc_quantize(-1.0, DIV) == 0


@given(st.floats(min_value=-2.0, max_value=8.0, allow_nan=False))
def test_adc_quantize_bounded_and_idempotent(v):
    code = adc_quantize(v, DIV)
    assert 0 <= code <= DIV.full_scale
    # re-quantizing the representable voltage of that code is stable
    representable = code / DIV.full_scale * DIV.v_ref
    assert adc_quantize(representable, DIV) == code


def test_accel_output_values():
    v_y, v_z = accel_output(0.0, 0.0, ACC)
    assert v_y == pytest.approx(1.5)
    assert v_z == pytest.approx(1.8)
    v_y30, _ = accel_output(30.0, 0.0, ACC)
    assert v_y30 == pytest.approx(1.65)


def test_accel_output_pitch_range():
    with pytest.raises(InputError):
        accel_output(90.5, 0.0, ACC)


def test_accel_noise_requires_rng_and_is_seeded():
    noisy = AccelerometerModel(noise_sigma=0.01)
    with pytest.raises(InputError):
        accel_output(0.0, 0.0, noisy)
    a = accel_output(0.0, 0.0, noisy, rng=np.random.default_rng(7))
    b = accel_output(0.0, 0.0, noisy, rng=np.random.default_rng(7))
    assert a == b
    c = accel_output(0.0, 0.0, noisy, rng=np.random.default_rng(8))
    assert a != c


@given(st.floats(min_value=0.0, max_value=180.0),
       st.floats(min_value=0.0, max_value=180.0))
def test_monotonicity_chain(a1, a2):
    # bend up => resistance up => divider voltage down => code non-increasing
    lo, hi = sorted((a1, a2))
    r_lo, r_hi = flex_resistance(lo, FLEX), flex_resistance(hi, FLEX)
    assert r_lo <= r_hi
    v_lo, v_hi = divider_voltage(r_lo, DIV), divider_voltage(r_hi, DIV)
    assert v_lo >= v_hi
    assert adc_quantize(v_lo, DIV) >= adc_quantize(v_hi, DIV)


def test_outputs_bit_deterministic():
    first = [adc_quantize(divider_voltage(flex_resistance(a, FLEX), DIV), DIV)
             for a in (0.0, 45.0, 90.0, 135.0, 180.0)]
    second = [adc_quantize(divider_voltage(flex_resistance(a, FLEX), DIV), DIV)
              for a in (0.0, 45.0, 90.0, 135.0, 180.0)]
    assert first == second


def _sample(t, label=""):
    return SensorSample(t=t, flex_adc=2000, acc_y_adc=1229, acc_z_adc=1474,
                        label=label)


def test_trace_rejects_non_monotone_timestamps():
    with pytest.raises(TraceFormatError):
        SensorTrace(samples=(_sample(0.0), _sample(0.0)), sample_period=1.0)


def test_trace_rejects_irregular_spacing():
    with pytest.raises(TraceFormatError):
        SensorTrace(samples=(_sample(0.0), _sample(1.0), _sample(2.5)),
                    sample_period=1.0)


def test_trace_csv_round_trip(tmp_path):
    trace = SensorTrace(samples=tuple(_sample(float(i), "tag" if i == 1 else "")
                                      for i in range(5)),
                        sample_period=1.0)
    path = tmp_path / "trace.csv"
    save_trace(trace, path)
    loaded = load_trace(path)
    assert loaded == trace
    save_trace(loaded, tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


def test_load_trace_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,flex\n0,1\n")
    with pytest.raises(TraceFormatError):
        load_trace(path)
