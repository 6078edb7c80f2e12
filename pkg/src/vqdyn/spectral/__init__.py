from .eigenset import EigenSet, Provenance, fix_phase
from .solver import (
    PenaltyHamiltonian,
    default_betas,
    dense_eigensolve,
    gershgorin_bounds,
    pauli_bounds,
    vqd_find,
)

__all__ = [
    "EigenSet",
    "PenaltyHamiltonian",
    "Provenance",
    "default_betas",
    "dense_eigensolve",
    "fix_phase",
    "gershgorin_bounds",
    "pauli_bounds",
    "vqd_find",
]
