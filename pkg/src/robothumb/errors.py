"""Exception hierarchy shared by all simulator modules."""


class RobothumbError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(RobothumbError):
    """A configuration value violates its documented invariant.

    The message always names the offending key.
    """


class InputError(RobothumbError):
    """An input value lies outside the domain an operation accepts."""


class ReachError(RobothumbError):
    """A requested key-line position is outside the finger's reach."""

    def __init__(self, message: str, max_reachable_x: float | None = None):
        super().__init__(message)
        self.max_reachable_x = max_reachable_x


class TravelRangeError(RobothumbError):
    """A requested press travel cannot be produced within the joint range."""


class CalibrationIncompleteError(RobothumbError):
    """A calibration trace or anchor file is missing a required entry."""

    def __init__(self, name: str):
        super().__init__(f"{name} missing")
        self.name = name


class DegenerateCalibrationError(RobothumbError):
    """A calibration anchor pair collapsed to a single value."""


class TraceFormatError(RobothumbError):
    """A sensor trace file is malformed or violates trace invariants."""
