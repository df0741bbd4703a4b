"""Exceptions raised by the identification pipeline."""


class TwoQubitError(Exception):
    """Base class for all package errors."""


class MalformedDataError(TwoQubitError):
    """Data cannot have been produced by any two-qubit Hamiltonian of the model class."""


class InsufficientOrderError(TwoQubitError):
    """The Taylor table is too short for the detected case."""

    def __init__(self, message: str, required: int, available: int):
        super().__init__(message)
        self.required = required
        self.available = available


class ReconstructionFailed(TwoQubitError):
    """Candidate Hamiltonians do not regenerate the input data."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InconsistentDataError(TwoQubitError):
    """Mean-value data are incompatible with the candidate Hamiltonian."""


class InvalidStateError(TwoQubitError):
    """Mean values do not describe a positive density matrix."""


class IllConditionedFitError(TwoQubitError):
    """Polynomial design matrix too ill-conditioned to trust."""


class NotNormalizableError(TwoQubitError):
    """Classical system cannot be brought to the symmetric normal form."""
