from dataclasses import dataclass

import numpy as np

from vqdyn.errors import CircuitError
from vqdyn.pauli import PauliString


@dataclass
class StateVector:
    """Complex amplitudes over the 2^N computational basis states."""

    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        size = self.amplitudes.shape[0] if self.amplitudes.ndim == 1 else 0
        if size < 2 or size & (size - 1):
            raise CircuitError(f"State dimension {self.amplitudes.shape} is not a power of two >= 2")

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def prepare_plus(n_qubits: int) -> StateVector:
    """|+>^N, uniform real amplitudes 2^{-N/2}."""
    if n_qubits < 1:
        raise CircuitError(f"Need at least one qubit, got {n_qubits}")
    dim = 1 << n_qubits
    return StateVector(np.full(dim, dim**-0.5, dtype=complex))


def prepare_basis(n_qubits: int, index: int = 0) -> StateVector:
    """Computational basis state |index>."""
    if n_qubits < 1 or not 0 <= index < 1 << n_qubits:
        raise CircuitError(f"Basis index {index} out of range for {n_qubits} qubits")
    amplitudes = np.zeros(1 << n_qubits, dtype=complex)
    amplitudes[index] = 1.0
    return StateVector(amplitudes)


def rotate(amplitudes: np.ndarray, generator: PauliString, angle: float) -> np.ndarray:
    """e^{i angle R} on a vector or a block of column vectors."""
    return np.cos(angle) * amplitudes + 1j * np.sin(angle) * generator.apply(amplitudes)


def apply_rotation(state: StateVector, generator: PauliString, angle: float) -> StateVector:
    """cos(theta) |psi> + i sin(theta) R|psi>."""
    if generator.n_qubits != state.n_qubits:
        raise CircuitError(f"Generator {generator} does not act on {state.n_qubits} qubits")
    return StateVector(rotate(state.amplitudes, generator, angle))
