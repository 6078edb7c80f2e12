from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from vqdyn.errors import CircuitError
from vqdyn.models.models import Reference
from vqdyn.pauli import PauliString
from vqdyn.sim.state import StateVector, prepare_basis, prepare_plus, rotate


@dataclass(frozen=True)
class Rotation:
    """e^{i angle R}."""

    generator: PauliString
    angle: float

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return rotate(amplitudes, self.generator, self.angle)

    def inverse(self) -> "Rotation":
        return Rotation(self.generator, -self.angle)

    @property
    def n_qubits(self) -> int:
        return self.generator.n_qubits


@dataclass(frozen=True)
class PauliGate:
    """phase * P with |phase| = 1."""

    string: PauliString
    phase: complex = 1.0

    def __post_init__(self):
        if not np.isclose(abs(self.phase), 1.0):
            raise CircuitError(f"Pauli gate phase must have unit modulus, got {self.phase}")

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.phase * self.string.apply(amplitudes)

    def inverse(self) -> "PauliGate":
        return PauliGate(self.string, np.conj(self.phase))

    @property
    def n_qubits(self) -> int:
        return self.string.n_qubits


Gate = Union[Rotation, PauliGate]


def reference_state(n_qubits: int, reference: Reference) -> StateVector:
    if reference == Reference.PLUS:
        return prepare_plus(n_qubits)
    return prepare_basis(n_qubits, 0)


@dataclass(frozen=True)
class Circuit:
    """Reference state followed by an ordered gate sequence."""

    n_qubits: int
    reference: Reference = Reference.PLUS
    gates: Tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            if gate.n_qubits != self.n_qubits:
                raise CircuitError(f"Gate {gate} does not act on {self.n_qubits} qubits")

    def inverse(self) -> "Circuit":
        """Adjoint of the gate sequence; the reference is kept."""
        return Circuit(self.n_qubits, self.reference, tuple(g.inverse() for g in reversed(self.gates)))

    def reference_state(self) -> StateVector:
        return reference_state(self.n_qubits, self.reference)

    def apply(self, state: StateVector) -> StateVector:
        if state.n_qubits != self.n_qubits:
            raise CircuitError(f"Circuit on {self.n_qubits} qubits applied to {state.n_qubits}-qubit state")
        amplitudes = state.amplitudes
        for gate in self.gates:
            amplitudes = gate.apply(amplitudes)
        return StateVector(amplitudes)

    def prepare(self) -> StateVector:
        return self.apply(self.reference_state())
