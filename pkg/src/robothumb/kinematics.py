"""Forward/inverse kinematics of the two-DOF finger and static torque needs.

The finger is a rigid chain: a knuckle link of length l0 in the horizontal
plane, a proximal link l1 and a distal link l2 joined at a fixed bend.
Rotation about the vertical axis (theta_h) sweeps the tip along the key
line; rotation about the horizontal press axis (theta_v, positive = down)
lowers the tip. With theta_v measured from the horizontal:

    radial r(tv) = l0 + l1*cos(tv) + l2*cos(tv + bend)
    drop   d(tv) = l1*sin(tv) + l2*sin(tv + bend)

so the tip sits at (r*cos(th), r*sin(th), -d) in the base frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, InputError, ReachError, TravelRangeError


@dataclass(frozen=True)
class FingerGeometry:
    l0_knuckle: float = 41.0    # mm
    l1_proximal: float = 58.0   # mm
    l2_distal: float = 48.5     # mm
    bend_angle: float = 60.0    # deg between proximal and distal links
    theta_h_range: float = 360.0  # deg of free horizontal rotation
    theta_v_min: float = -90.0  # deg, most raised press angle
    theta_v_max: float = 30.0   # deg, deepest press angle

    def __post_init__(self):
        for name in ("l0_knuckle", "l1_proximal", "l2_distal"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        if not 0 < self.bend_angle <= 90:
            raise ConfigurationError("bend_angle must be in (0, 90]")
        span = self.theta_v_max - self.theta_v_min
        if not 0 < span <= 120:
            raise ConfigurationError("theta_v span must be in (0, 120]")


@dataclass(frozen=True)
class JointState:
    theta_h: float  # deg about the vertical axis
    theta_v: float  # deg about the press axis, positive downward


@dataclass(frozen=True)
class MountPose:
    """Placement of the device base relative to the keyboard.

    base_x runs along the key line, base_z is the pivot height above the
    undepressed key surface, heading is the horizontal-axis zero direction,
    and depth is the hand's in/out position used for black-key addressing.
    """

    base_x: float = 600.0   # mm along the keyboard
    base_z: float = 47.0    # mm above the key surface
    heading: float = 73.0   # deg added to the horizontal axis angle
    depth: float = 0.0      # mm toward the fallboard

    def __post_init__(self):
        if self.base_z <= 0:
            raise ConfigurationError("base_z must be positive")


def radial_extension(theta_v: float, geometry: FingerGeometry) -> float:
    """Horizontal distance (mm) from the vertical axis to the fingertip."""
    tv = math.radians(theta_v)
    bend = math.radians(geometry.bend_angle)
    return (geometry.l0_knuckle
            + geometry.l1_proximal * math.cos(tv)
            + geometry.l2_distal * math.cos(tv + bend))


def press_drop(theta_v: float, geometry: FingerGeometry) -> float:
    """Vertical drop (mm) of the fingertip below the press-axis plane."""
    tv = math.radians(theta_v)
    bend = math.radians(geometry.bend_angle)
    return (geometry.l1_proximal * math.sin(tv)
            + geometry.l2_distal * math.sin(tv + bend))


def _check_joints(joints: JointState, geometry: FingerGeometry) -> None:
    half = geometry.theta_h_range / 2.0
    if not -half <= joints.theta_h <= half:
        raise InputError(f"theta_h {joints.theta_h} outside +/-{half}")
    if not geometry.theta_v_min <= joints.theta_v <= geometry.theta_v_max:
        raise InputError(
            f"theta_v {joints.theta_v} outside "
            f"[{geometry.theta_v_min}, {geometry.theta_v_max}]")


def fingertip_position(joints: JointState, geometry: FingerGeometry) -> tuple[float, float, float]:
    """Fingertip (x, y, z) in mm in the base frame."""
    _check_joints(joints, geometry)
    r = radial_extension(joints.theta_v, geometry)
    d = press_drop(joints.theta_v, geometry)
    th = math.radians(joints.theta_h)
    return (r * math.cos(th), r * math.sin(th), -d)


def keyline_position(theta_h_world: float, theta_v: float,
                     geometry: FingerGeometry, mount: MountPose) -> tuple[float, float]:
    """Fingertip position projected onto the key line: (x along keys, z above keys)."""
    r = radial_extension(theta_v, geometry)
    d = press_drop(theta_v, geometry)
    x = mount.base_x + r * math.cos(math.radians(theta_h_world))
    return x, mount.base_z - d


def theta_for_key(key_center_x: float, mount: MountPose, geometry: FingerGeometry,
                  hover_theta_v: float = 0.0) -> float:
    """Horizontal angle (deg, world frame) placing the hovering tip over a key center.

    Solved in closed form from the circle of radius r(hover) around the
    base; of the two intersections the one facing the keyboard (angle in
    [0, 180]) is returned. Raises ReachError for keys outside the circle,
    reporting the furthest reachable x.
    """
    r = radial_extension(hover_theta_v, geometry)
    dx = key_center_x - mount.base_x
    if abs(dx) > r:
        raise ReachError(
            f"key at x={key_center_x} mm is beyond reach; max reachable "
            f"x={mount.base_x + r:.2f} mm",
            max_reachable_x=mount.base_x + r)
    return math.degrees(math.acos(dx / r))


def press_angle(travel: float, geometry: FingerGeometry,
                hover_theta_v: float = 0.0) -> float:
    """Smallest press rotation (deg) that lowers the tip by ``travel`` mm.

    d(tv) collapses to R*sin(tv + phi), so the press angle has the closed
    form asin((d(hover) + travel)/R) - phi on the rising branch.
    """
    if travel < 0:
        raise InputError("travel must be non-negative")
    if travel == 0:
        return 0.0
    bend = math.radians(geometry.bend_angle)
    a = geometry.l1_proximal + geometry.l2_distal * math.cos(bend)
    b = geometry.l2_distal * math.sin(bend)
    amplitude = math.hypot(a, b)
    phase = math.atan2(b, a)
    target = press_drop(hover_theta_v, geometry) + travel
    if target > amplitude:
        raise TravelRangeError(
            f"travel {travel} mm exceeds the maximum drop "
            f"{amplitude - press_drop(hover_theta_v, geometry):.2f} mm from hover")
    theta = math.degrees(math.asin(target / amplitude) - phase)
    if theta > geometry.theta_v_max:
        raise TravelRangeError(
            f"travel {travel} mm needs theta_v {theta:.2f} deg, beyond the "
            f"joint limit {geometry.theta_v_max} deg")
    return theta - hover_theta_v


def required_torque(force: float, theta_v: float, geometry: FingerGeometry) -> float:
    """Torque (N*m) about the press axis to exert ``force`` N at the tip."""
    if force < 0:
        raise InputError("force must be non-negative")
    tv = math.radians(theta_v)
    bend = math.radians(geometry.bend_angle)
    arm_mm = (geometry.l1_proximal * math.cos(tv)
              + geometry.l2_distal * math.cos(tv + bend))
    return force * arm_mm / 1000.0
