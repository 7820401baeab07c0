"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for everything this package raises deliberately."""


class ParameterError(SimulationError, ValueError):
    """A configuration value violates a declared invariant."""


class ConfigError(SimulationError):
    """Config file cannot be parsed or validated; message carries the key path."""


class DriveError(SimulationError):
    """Invalid excitation request (window overlap, current limit)."""


class WindowError(SimulationError):
    """Analysis window does not cover the required whole periods."""


class SolverError(SimulationError):
    """Root finding failed to converge within the iteration budget."""


class BracketError(SolverError):
    """Root finding could not bracket a sign change."""


class ClearanceError(SimulationError):
    """Wire/beam clearance is non-positive somewhere in the operating envelope."""

    def __init__(self, clearance, message=None):
        self.clearance = clearance
        super().__init__(message or f"design violation: clearance {clearance:.3e} m <= 0")


class NumericError(SimulationError):
    """State became non-finite."""
