from .circuit import Circuit, Gate, PauliGate, Rotation, reference_state
from .measure import (
    PHASE_KICK_EPSILONS,
    ControlledOp,
    element_rng,
    expectation,
    hadamard_test,
    overlap_sq,
    phase_kick_element,
    sampling_std,
    transition_element,
)
from .state import StateVector, apply_rotation, prepare_basis, prepare_plus, rotate

__all__ = [
    "PHASE_KICK_EPSILONS",
    "Circuit",
    "ControlledOp",
    "Gate",
    "PauliGate",
    "Rotation",
    "StateVector",
    "apply_rotation",
    "element_rng",
    "expectation",
    "hadamard_test",
    "overlap_sq",
    "phase_kick_element",
    "prepare_basis",
    "prepare_plus",
    "reference_state",
    "rotate",
    "sampling_std",
    "transition_element",
]
