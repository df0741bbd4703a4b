"""Identify a two-qubit Hamiltonian from the dynamics of one qubit."""

from .dynamics import TaylorTable, TwoQubitState, map_snapshot, mean_trajectory, taylor_maps
from .errors import (
    InconsistentDataError,
    InsufficientOrderError,
    ReconstructionFailed,
    TwoQubitError,
)
from .hamiltonian import (
    CanonicalHamiltonian,
    GeneralHamiltonian,
    canonicalize,
    sign_partner,
    to_matrix,
)
from .reconstruction import CaseClass, ReconstructionReport, reconstruct
from .state_recovery import recover_environment

__all__ = [
    "CanonicalHamiltonian",
    "CaseClass",
    "GeneralHamiltonian",
    "InconsistentDataError",
    "InsufficientOrderError",
    "ReconstructionFailed",
    "ReconstructionReport",
    "TaylorTable",
    "TwoQubitError",
    "TwoQubitState",
    "canonicalize",
    "map_snapshot",
    "mean_trajectory",
    "reconstruct",
    "recover_environment",
    "sign_partner",
    "taylor_maps",
    "to_matrix",
]
