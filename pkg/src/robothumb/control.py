"""Calibration procedure and the two control laws driving the axes.

Calibration anchors both linear maps: thumb flex codes to horizontal
encoder counts (closest to furthest note) and foot Y-accelerometer codes
to vertical encoder counts (hover to fully pressed). The horizontal
profile velocity follows a proportional law in the remaining distance,
the vertical profile velocity follows the foot's Z acceleration so a
faster lift presses harder.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (CalibrationIncompleteError, ConfigurationError,
                     DegenerateCalibrationError)
from .plant import POSITION, AxisCommand, MotorAxis, counts_per_output_rev, round_half_away
from .kinematics import FingerGeometry
from .sensors import SensorTrace, round_half_up

# trace labels consumed by calibrate_from_trace
REQUIRED_LABELS = ("flex_min", "flex_max", "foot_down", "foot_up", "z_rest", "z_active")
# encoder anchors supplied alongside the trace
ANCHOR_NAMES = ("enc_h_min", "enc_h_max", "enc_hover", "enc_pressed")

_FIELDS = ("flex_min", "flex_max", "enc_h_min", "enc_h_max",
           "y_min", "y_max", "z_min", "z_max", "enc_hover", "enc_pressed")


@dataclass(frozen=True)
class CalibrationSet:
    """Min/max anchors defining both sensor-to-position maps."""

    flex_min: int      # flex ADC code, thumb straight
    flex_max: int      # flex ADC code, thumb fully flexed
    enc_h_min: int     # horizontal counts at the closest note
    enc_h_max: int     # horizontal counts at the furthest note
    y_min: int         # Y ADC code, foot on the ground
    y_max: int         # Y ADC code, foot lifted
    z_min: int         # Z ADC code, foot stationary
    z_max: int         # Z ADC code, foot lifting briskly
    enc_hover: int     # vertical counts hovering above the keys
    enc_pressed: int   # vertical counts at a full key press

    def __post_init__(self):
        for lo, hi in (("flex_min", "flex_max"), ("y_min", "y_max"),
                       ("z_min", "z_max"), ("enc_hover", "enc_pressed")):
            if getattr(self, lo) == getattr(self, hi):
                raise DegenerateCalibrationError(f"{lo} equals {hi}")


@dataclass(frozen=True)
class ControlParams:
    kp_h: float = 0.3            # (deg/s) per count of horizontal distance
    v_cap: float = 400.0         # deg/s ceiling for both profile velocities
    kv_z: float = 442.0          # deg/s per unit of normalized Z activity
    v_floor: float = 5.0         # deg/s floor so vertical motion always completes
    z_threshold: int = 80        # codes above z_min that signal an intention
    z_refractory_ms: float = 250.0  # ignore further crossings for one press cycle

    def __post_init__(self):
        if self.kp_h <= 0:
            raise ConfigurationError("kp_h must be positive")
        if self.v_cap <= 0:
            raise ConfigurationError("v_cap must be positive")
        if self.kv_z <= 0:
            raise ConfigurationError("kv_z must be positive")
        if not 0 < self.v_floor <= self.v_cap:
            raise ConfigurationError("v_floor must be in (0, v_cap]")
        if self.z_threshold <= 0:
            raise ConfigurationError("z_threshold must be positive")
        if self.z_refractory_ms < 0:
            raise ConfigurationError("z_refractory_ms must be non-negative")


def linear_map(s: float, s_min: float, s_max: float,
               p_min: float, p_max: float) -> float:
    """Affine map taking s_min -> p_min and s_max -> p_max, clamped to the p range."""
    if s_min == s_max:
        raise DegenerateCalibrationError("degenerate map: s_min equals s_max")
    p = p_min + (s - s_min) * (p_max - p_min) / (s_max - s_min)
    lo, hi = min(p_min, p_max), max(p_min, p_max)
    return min(max(p, lo), hi)


def calibrate_from_trace(trace: SensorTrace, anchors: dict) -> CalibrationSet:
    """Build a calibration from labeled trace segments plus encoder anchors.

    Each sensor anchor is the mean of its labeled samples rounded to the
    nearest code; segment means reject single-sample noise. ``anchors``
    must supply the four encoder positions recorded when the finger was
    driven to its reference poses.
    """
    sums = {label: [0, 0] for label in REQUIRED_LABELS}  # label -> [total, count]
    for sample in trace.samples:
        if sample.label not in sums:
            continue
        if sample.label in ("flex_min", "flex_max"):
            value = sample.flex_adc
        elif sample.label in ("foot_down", "foot_up"):
            value = sample.acc_y_adc
        else:
            value = sample.acc_z_adc
        bucket = sums[sample.label]
        bucket[0] += value
        bucket[1] += 1
    for label in REQUIRED_LABELS:
        if sums[label][1] == 0:
            raise CalibrationIncompleteError(label)
    for name in ANCHOR_NAMES:
        if name not in anchors:
            raise CalibrationIncompleteError(name)

    def mean_code(label: str) -> int:
        total, count = sums[label]
        return round_half_up(total / count)

    return CalibrationSet(
        flex_min=mean_code("flex_min"),
        flex_max=mean_code("flex_max"),
        enc_h_min=int(anchors["enc_h_min"]),
        enc_h_max=int(anchors["enc_h_max"]),
        y_min=mean_code("foot_down"),
        y_max=mean_code("foot_up"),
        z_min=mean_code("z_rest"),
        z_max=mean_code("z_active"),
        enc_hover=int(anchors["enc_hover"]),
        enc_pressed=int(anchors["enc_pressed"]),
    )


def validate_calibration_ranges(calib: CalibrationSet, geometry: FingerGeometry,
                                axis: MotorAxis) -> None:
    """Check that encoder anchors fit inside the joint ranges."""
    cpd = counts_per_output_rev(axis) / 360.0
    h_half = geometry.theta_h_range / 2.0 * cpd
    for name in ("enc_h_min", "enc_h_max"):
        if abs(getattr(calib, name)) > h_half:
            raise ConfigurationError(f"{name} outside the horizontal joint range")
    v_lo, v_hi = geometry.theta_v_min * cpd, geometry.theta_v_max * cpd
    for name in ("enc_hover", "enc_pressed"):
        value = getattr(calib, name)
        if not v_lo - 0.5 <= value <= v_hi + 0.5:
            raise ConfigurationError(f"{name} outside the vertical joint range")


def horizontal_update(flex_adc: int, calib: CalibrationSet, params: ControlParams,
                      current_counts: int) -> AxisCommand:
    """Position command for the horizontal axis from one flex reading.

    The profile velocity is proportional to the remaining distance, capped
    at v_cap, so larger repositioning moves run faster.
    """
    setpoint = round_half_away(linear_map(
        flex_adc, calib.flex_min, calib.flex_max, calib.enc_h_min, calib.enc_h_max))
    velocity = min(params.kp_h * abs(setpoint - current_counts), params.v_cap)
    return AxisCommand(mode=POSITION, setpoint=setpoint, velocity_limit=velocity)


def vertical_update(acc_y_adc: int, acc_z_adc: int, calib: CalibrationSet,
                    params: ControlParams) -> AxisCommand:
    """Position command for the vertical axis from one accelerometer reading.

    Y places the finger between hover (foot down) and full press (foot
    lifted); Z sets how fast it gets there, with a floor so the motion
    always completes.
    """
    setpoint = round_half_away(linear_map(
        acc_y_adc, calib.y_min, calib.y_max, calib.enc_hover, calib.enc_pressed))
    z_norm = (acc_z_adc - calib.z_min) / (calib.z_max - calib.z_min)
    velocity = min(max(params.kv_z * z_norm, params.v_floor), params.v_cap)
    return AxisCommand(mode=POSITION, setpoint=setpoint, velocity_limit=velocity)


def save_calibration(calib: CalibrationSet, path) -> None:
    """Write a calibration as one ``name = integer`` line per anchor."""
    with open(path, "w") as f:
        for name in _FIELDS:
            f.write(f"{name} = {getattr(calib, name)}\n")


def load_calibration(path) -> CalibrationSet:
    values = read_kv_file(path)
    for name in _FIELDS:
        if name not in values:
            raise CalibrationIncompleteError(name)
    return CalibrationSet(**{name: int(values[name]) for name in _FIELDS})


def read_kv_file(path) -> dict:
    """Parse a flat ``name = value`` text file into an ordered dict of floats."""
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'name = value'")
            name, _, raw = line.partition("=")
            try:
                values[name.strip()] = float(raw.strip())
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
    return values


def write_kv_file(values: dict, path) -> None:
    with open(path, "w") as f:
        for name, value in values.items():
            f.write(f"{name} = {value}\n")
