"""Exception taxonomy.

Exceptions are grouped so the CLI can map them onto exit codes without
inspecting messages: configuration problems exit 2, malformed or empty data
exits 3, solver and fit failures exit 4.
"""


class RingtrapError(Exception):
    """Base class for all package errors."""


class ConfigError(RingtrapError):
    """Invalid configuration: bad field values, unknown keys, missing files."""


class DataFormatError(RingtrapError):
    """Input dataset is malformed, empty, or has inconsistent columns."""


class PhysicsError(RingtrapError):
    """Base for solver-side failures."""


class DomainError(PhysicsError):
    """Function evaluated outside its domain of validity (NaN/inf encountered)."""


class ResolutionError(PhysicsError):
    """Spatial grid too coarse to resolve the requested states."""


class StiffnessError(PhysicsError):
    """ODE integrator failed to advance (step underflow on a stiff system)."""


class FitError(PhysicsError):
    """Base for nonlinear-fit failures."""


class DegenerateFitError(FitError):
    """Normal equations singular: parameters not identifiable from the data."""


class InsufficientSignalError(FitError):
    """Dataset carries too little signal to constrain the requested parameters."""


class CalibrationError(PhysicsError):
    """Self-calibration could not reach its anchor conditions."""
