from .grid import DVRGrid
from .operators import (
    GridOperator,
    OperatorKind,
    assemble_hamiltonian,
    build_kinetic_1d,
    build_potential,
    hamiltonian_from_potential,
    kinetic_operator,
    kinetic_term_count,
    load_tabulated_potential,
)

__all__ = [
    "DVRGrid",
    "GridOperator",
    "OperatorKind",
    "assemble_hamiltonian",
    "build_kinetic_1d",
    "build_potential",
    "hamiltonian_from_potential",
    "kinetic_operator",
    "kinetic_term_count",
    "load_tabulated_potential",
]
