"""Exception hierarchy shared by every vqdyn subsystem."""

from typing import Any, Dict, Optional


class VqdynError(Exception):
    """Base class for all errors raised by vqdyn."""


class GridError(VqdynError):
    """Invalid grid definition or potential values."""


class DenseCapError(VqdynError):
    """Dense materialisation requested above the configured cap."""


class EncodingError(VqdynError):
    """Binary encoding / Pauli decomposition received invalid input."""


class NonHermitianError(VqdynError):
    """An operation that needs a Hermitian operator received something else."""


class CircuitError(VqdynError):
    """Malformed circuit or controlled-operation sequence."""


class AnsatzError(VqdynError):
    """The ansatz cannot be built or evaluated."""


class IntegrationError(VqdynError):
    """Parameter equation of motion could not be solved."""


class StepSizeError(IntegrationError):
    """The integration step is too large for the requested accuracy."""


class ConvergenceError(VqdynError):
    """Iterative search ended without meeting its acceptance criterion."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PropagationError(VqdynError):
    """Exact propagation produced a non-unitary step."""


class SpectrumError(VqdynError):
    """Spectrum extraction received an unusable time series."""


class ConfigError(VqdynError):
    """Configuration file failed schema validation."""

    def __init__(self, message: str, field_path: Optional[str] = None):
        super().__init__(message)
        self.field_path = field_path


class InvalidFieldError(ValueError):
    """A workflow field holds a value outside its allowed range."""

    def __init__(self, message: str, field_path: str):
        super().__init__(message)
        self.field_path = field_path
