"""Fixed-timestep simulation of the complete sensing-to-actuation pipeline.

One run consumes a sensor trace and plays it through the full chain:

    trace sample --(sensor_sample + adc_transport)--> control update
    control update --(compute + command_transport + controller_process)--> axis command
    axis command --> profile motion --> fingertip --> key events

The five data-path latencies are pure transport delays: a sample taken at
time t yields a command that takes effect at exactly t + sensor path +
command path. The ``mech_motion`` entry of the latency budget is realized
by the simulated axis transit itself (the sweep from hover down to the
press threshold), not by an additional queue, so the measured
intention-to-action delay is the data-path delay plus the actual
mechanical motion time.

Key events come from the fingertip height: crossing below the full-press
height (one key travel below the undepressed surface) while over a key
emits a key-on whose MIDI velocity encodes the press-axis speed at the
crossing; rising back above it emits the key-off. Intentions are upward
crossings of the Z-accelerometer threshold in the raw trace timeline.

Both execution modes produce byte-identical logs: deterministic mode runs
everything inline, concurrent mode evaluates the two control pipelines on
worker threads and merges their commands by timestamp with the horizontal
pipeline winning ties.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from . import control, kinematics, plant
from .control import CalibrationSet, ControlParams
from .errors import ConfigurationError, InputError
from .piano import Key, KeyEvent, MIDI_A0, key_at, note_name
from .sensors import SensorTrace, round_half_up

if TYPE_CHECKING:  # avoids a circular import; config builds on this module
    from .config import GlobalConfig


@dataclass(frozen=True)
class LatencyConfig:
    """Per-stage delays of the pipeline, in milliseconds."""

    sensor_sample: float = 5.0
    adc_transport: float = 10.0
    compute: float = 5.0
    command_transport: float = 10.0
    controller_process: float = 5.0
    mech_motion: float = 50.0  # budgeted allowance for the mechanical sweep

    def __post_init__(self):
        for name in ("sensor_sample", "adc_transport", "compute",
                     "command_transport", "controller_process", "mech_motion"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")

    @property
    def sensor_path(self) -> float:
        return self.sensor_sample + self.adc_transport

    @property
    def command_path(self) -> float:
        return self.compute + self.command_transport + self.controller_process

    @property
    def data_path(self) -> float:
        """Sum of the transport-delay stages (everything but the sweep)."""
        return self.sensor_path + self.command_path

    @property
    def total(self) -> float:
        return self.data_path + self.mech_motion


@dataclass(frozen=True)
class SimulationConfig:
    timestep: float = 1.0        # ms
    seed: int = 0
    mode: str = "deterministic"  # "deterministic" | "concurrent"
    latency: LatencyConfig = field(default_factory=LatencyConfig)
    settle_tail_ms: float = 200.0  # extra time simulated past the last sample

    def __post_init__(self):
        if self.timestep <= 0:
            raise ConfigurationError("timestep must be positive")
        if self.mode not in ("deterministic", "concurrent"):
            raise ConfigurationError("mode must be deterministic or concurrent")
        if self.settle_tail_ms < 0:
            raise ConfigurationError("settle_tail_ms must be non-negative")


@dataclass(frozen=True)
class LatencyRecord:
    intention_t: float  # ms, Z threshold crossing in the trace timeline
    action_t: float     # ms, key-on emission

    def __post_init__(self):
        if self.action_t < self.intention_t:
            raise InputError("action_t must not precede intention_t")

    @property
    def delay(self) -> float:
        return self.action_t - self.intention_t


@dataclass(frozen=True)
class StepRecord:
    t: float
    theta_h_counts: int
    theta_v_counts: int
    tip_x: float
    tip_z: float


@dataclass
class EventLog:
    events: list[KeyEvent] = field(default_factory=list)
    latencies: list[LatencyRecord] = field(default_factory=list)
    steps: list[StepRecord] = field(default_factory=list)
    intentions: list[float] = field(default_factory=list)
    air_presses: list[float] = field(default_factory=list)


def midi_velocity(angular_speed: float, v_cap: float) -> int:
    """Map a press-axis speed (deg/s) to MIDI velocity 1..127."""
    if angular_speed < 0:
        raise InputError("angular_speed must be non-negative")
    return min(max(round_half_up(127.0 * angular_speed / v_cap), 1), 127)


def intention_detect(trace: SensorTrace, calib: CalibrationSet,
                     params: ControlParams) -> list[float]:
    """Timestamps of upward Z-threshold crossings in the raw trace.

    A refractory window after each detection swallows the landing spike of
    the same press cycle, so one press cycle yields one intention.
    """
    threshold = calib.z_min + params.z_threshold
    out: list[float] = []
    below = True
    refractory_until = -math.inf
    for sample in trace.samples:
        above = sample.acc_z_adc >= threshold
        if above and below and sample.t >= refractory_until:
            out.append(sample.t)
            refractory_until = sample.t + params.z_refractory_ms
        below = not above
    return out


def run(trace: SensorTrace, calibration: CalibrationSet,
        config: "GlobalConfig") -> EventLog:
    """Simulate a full trace; returns the event log.

    Deterministic for fixed inputs: identical trace, calibration and
    configuration produce identical logs in either execution mode.
    """
    control.validate_calibration_ranges(calibration, config.geometry, config.axis)
    full_scale = config.divider.full_scale
    for s in trace.samples:
        for code in (s.flex_adc, s.acc_y_adc, s.acc_z_adc):
            if not 0 <= code <= full_scale:
                raise InputError(
                    f"sample at t={s.t} ms carries ADC code {code} outside "
                    f"[0, {full_scale}]")

    sim = config.simulation
    lat = sim.latency
    params = config.control
    geometry = config.geometry
    mount = config.mount
    layout = config.layout
    axis = config.axis
    dt = sim.timestep

    log = EventLog()
    log.intentions = intention_detect(trace, calibration, params)
    if not trace.samples:
        return log

    press_height = -layout.key_travel  # tip z of a fully pressed key

    state_h = plant.AxisState()
    state_v = plant.AxisState()
    cmd_h = plant.AxisCommand(plant.POSITION, 0, 0.0)
    cmd_v = plant.AxisCommand(plant.POSITION, 0, 0.0)

    # (effective_t, pipeline, command); constant delays keep it time-sorted
    command_queue: list[tuple[float, int, plant.AxisCommand]] = []
    qi = 0

    executor = ThreadPoolExecutor(max_workers=2) if sim.mode == "concurrent" else None
    try:
        samples = trace.samples
        si = 0
        ii = 0
        pressed: Key | None = None
        prev_tip_z = mount.base_z - kinematics.press_drop(state_v.angle, geometry)

        end_t = samples[-1].t + lat.data_path + sim.settle_tail_ms
        n_steps = int(math.ceil(end_t / dt))
        for k in range(1, n_steps + 1):
            t = k * dt

            # feed every sample whose sensor path completes within this step
            while si < len(samples) and samples[si].t + lat.sensor_path <= t:
                s = samples[si]
                si += 1
                effective = s.t + lat.data_path
                if executor is not None:
                    fut_h = executor.submit(control.horizontal_update, s.flex_adc,
                                            calibration, params, state_h.encoder_count)
                    fut_v = executor.submit(control.vertical_update, s.acc_y_adc,
                                            s.acc_z_adc, calibration, params)
                    new_h, new_v = fut_h.result(), fut_v.result()
                else:
                    new_h = control.horizontal_update(s.flex_adc, calibration,
                                                      params, state_h.encoder_count)
                    new_v = control.vertical_update(s.acc_y_adc, s.acc_z_adc,
                                                    calibration, params)
                # merged by timestamp; horizontal before vertical on ties
                command_queue.append((effective, 0, new_h))
                command_queue.append((effective, 1, new_v))

            # commands take effect no later than their effective instant:
            # one falling in (t - dt, t] acts over that whole step
            while qi < len(command_queue) and command_queue[qi][0] <= t:
                _, pipeline, cmd = command_queue[qi]
                qi += 1
                if pipeline == 0:
                    cmd_h = cmd
                else:
                    cmd_v = cmd

            state_h = plant.axis_step(state_h, cmd_h, dt, axis)
            state_v = plant.axis_step(state_v, cmd_v, dt, axis)

            theta_h_world = mount.heading + state_h.angle
            tip_x, tip_z = kinematics.keyline_position(
                theta_h_world, state_v.angle, geometry, mount)

            log.steps.append(StepRecord(t, state_h.encoder_count,
                                        state_v.encoder_count, tip_x, tip_z))

            if pressed is None and prev_tip_z > press_height >= tip_z:
                key = key_at(tip_x, mount.depth, layout)
                if key is None:
                    log.air_presses.append(t)
                else:
                    velocity = midi_velocity(abs(state_v.velocity), params.v_cap)
                    log.events.append(KeyEvent(t, "on", key.index, velocity))
                    pressed = key
                    if ii < len(log.intentions) and log.intentions[ii] <= t:
                        log.latencies.append(LatencyRecord(log.intentions[ii], t))
                        ii += 1
            elif pressed is not None and tip_z > press_height >= prev_tip_z:
                log.events.append(KeyEvent(t, "off", pressed.index))
                pressed = None

            prev_tip_z = tip_z

        if pressed is not None:
            # trace ended mid-press: release so on/off stay balanced
            log.events.append(KeyEvent(n_steps * dt, "off", pressed.index))
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    return log


def write_event_csv(log: EventLog, path) -> None:
    with open(path, "w", newline="") as f:
        f.write("t_ms,kind,key_index,note_name,velocity\n")
        for e in log.events:
            name = note_name(MIDI_A0 + e.key_index)
            velocity = "" if e.velocity is None else str(e.velocity)
            f.write(f"{e.t:.3f},{e.kind},{e.key_index},{name},{velocity}\n")


def write_step_csv(log: EventLog, path) -> None:
    with open(path, "w", newline="") as f:
        f.write("t_ms,theta_h_counts,theta_v_counts,tip_x,tip_z\n")
        for s in log.steps:
            f.write(f"{s.t:.3f},{s.theta_h_counts},{s.theta_v_counts},"
                    f"{s.tip_x:.6f},{s.tip_z:.6f}\n")


def write_latency_csv(log: EventLog, path) -> None:
    with open(path, "w", newline="") as f:
        f.write("intention_ms,action_ms,delay_ms\n")
        for r in log.latencies:
            f.write(f"{r.intention_t:.3f},{r.action_t:.3f},{r.delay:.3f}\n")


def read_latency_csv(path) -> list[LatencyRecord]:
    records = []
    with open(path) as f:
        header = f.readline().strip()
        if header != "intention_ms,action_ms,delay_ms":
            raise InputError(f"{path}: not a latency log")
        for line in f:
            line = line.strip()
            if not line:
                continue
            intention, action, _ = line.split(",")
            records.append(LatencyRecord(float(intention), float(action)))
    return records
