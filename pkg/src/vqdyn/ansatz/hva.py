import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import yaml

from vqdyn.constants import INIT_PARAM_SCALE
from vqdyn.errors import AnsatzError
from vqdyn.models.models import InitKind, Reference
from vqdyn.pauli import PauliString, PauliSum
from vqdyn.sim import Circuit, Rotation, StateVector, reference_state, rotate

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Ansatz:
    """
    Product of Pauli rotations prod_k e^{i theta_k R_k} applied to a reference state.

    The first generator acts first. Generators have weight one or two.
    """

    generators: Tuple[PauliString, ...]
    params: np.ndarray
    layers: int = 1
    reference: Reference = Reference.PLUS

    def __post_init__(self):
        generators = tuple(self.generators)
        if not generators:
            raise AnsatzError("Ansatz has no generators")
        n_qubits = generators[0].n_qubits
        for g in generators:
            if g.weight not in (1, 2):
                raise AnsatzError(f"Generator {g} has weight {g.weight}; only one- and two-qubit rotations are allowed")
            if g.n_qubits != n_qubits:
                raise AnsatzError(f"Generator {g} does not act on {n_qubits} qubits")
        params = np.array(self.params, dtype=float)
        if params.shape != (len(generators),):
            raise AnsatzError(f"Expected {len(generators)} parameters, got shape {params.shape}")
        if not np.all(np.isfinite(params)):
            raise AnsatzError("Ansatz parameters must be finite")
        params.setflags(write=False)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "params", params)

    @property
    def n_params(self) -> int:
        return len(self.generators)

    @property
    def n_qubits(self) -> int:
        return self.generators[0].n_qubits

    def with_params(self, params: Sequence[float]) -> "Ansatz":
        return Ansatz(self.generators, np.asarray(params, dtype=float), self.layers, self.reference)

    def _resolve(self, params: Optional[Sequence[float]]) -> np.ndarray:
        if params is None:
            return self.params
        params = np.asarray(params, dtype=float)
        if params.shape != self.params.shape:
            raise AnsatzError(f"Expected {self.n_params} parameters, got shape {params.shape}")
        return params

    def circuit(self, params: Optional[Sequence[float]] = None) -> Circuit:
        angles = self._resolve(params)
        return Circuit(
            self.n_qubits,
            self.reference,
            tuple(Rotation(g, float(t)) for g, t in zip(self.generators, angles)),
        )

    def prepare(self, params: Optional[Sequence[float]] = None) -> StateVector:
        angles = self._resolve(params)
        amplitudes = reference_state(self.n_qubits, self.reference).amplitudes
        for g, t in zip(self.generators, angles):
            amplitudes = rotate(amplitudes, g, t)
        return StateVector(amplitudes)

    def derivative_states(self, params: Optional[Sequence[float]] = None) -> np.ndarray:
        """
        All derivative vectors d|psi>/d theta_k as rows of an (N_theta, 2^N) array.

        Row k carries iR_k inserted right after the k-th rotation; earlier rows are
        pushed through each later rotation as the sweep proceeds.
        """
        angles = self._resolve(params)
        amplitudes = reference_state(self.n_qubits, self.reference).amplitudes
        block = np.zeros((amplitudes.size, self.n_params), dtype=complex)
        for k, (g, t) in enumerate(zip(self.generators, angles)):
            amplitudes = rotate(amplitudes, g, t)
            if k:
                block[:, :k] = rotate(block[:, :k], g, t)
            block[:, k] = 1j * g.apply(amplitudes)
        return block.T.copy()

    def derivative_state(self, k: int, params: Optional[Sequence[float]] = None) -> StateVector:
        """Unnormalised d|psi>/d theta_k."""
        if not 0 <= k < self.n_params:
            raise AnsatzError(f"Parameter index {k} outside [0, {self.n_params})")
        angles = self._resolve(params)
        amplitudes = reference_state(self.n_qubits, self.reference).amplitudes
        for j, (g, t) in enumerate(zip(self.generators, angles)):
            amplitudes = rotate(amplitudes, g, t)
            if j == k:
                amplitudes = 1j * g.apply(amplitudes)
        return StateVector(amplitudes)

    def to_manifest(self) -> dict:
        return {
            "layers": self.layers,
            "reference": self.reference.value,
            "generators": [g.letters for g in self.generators],
            "params": [float(t) for t in self.params],
        }

    @classmethod
    def from_manifest(cls, data: dict) -> "Ansatz":
        try:
            return cls(
                tuple(PauliString(s) for s in data["generators"]),
                np.asarray(data["params"], dtype=float),
                int(data.get("layers", 1)),
                Reference(data.get("reference", Reference.PLUS.value)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise AnsatzError(f"Invalid ansatz manifest: {e}") from e

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_manifest(), f, sort_keys=False)
        return path

    @classmethod
    def load(cls, path: Path) -> "Ansatz":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_manifest(yaml.safe_load(f) or {})


def hva_generators(H: PauliSum) -> Tuple[PauliString, ...]:
    """Distinct weight-1 and weight-2 strings of H, weight-1 first, lexicographic within."""
    kept = [PauliString(s) for s, _ in H if PauliString(s).weight in (1, 2)]
    return tuple(sorted(kept, key=lambda p: (p.weight, p.letters)))


def initial_params(
    count: int, init: InitKind = InitKind.UNIFORM, scale: float = INIT_PARAM_SCALE, seed: Optional[int] = None
) -> np.ndarray:
    if init == InitKind.ZEROS:
        return np.zeros(count)
    return np.random.default_rng(seed).uniform(-scale, scale, size=count)


def build_hva(
    H: PauliSum,
    layers: int = 2,
    init: InitKind = InitKind.UNIFORM,
    scale: float = INIT_PARAM_SCALE,
    seed: Optional[int] = None,
    reference: Reference = Reference.PLUS,
) -> Ansatz:
    """
    Hamiltonian variational ansatz: the one- and two-qubit strings of H, repeated per layer,
    one parameter per generator per layer.
    """
    H.require_hermitian()
    if layers < 1:
        raise AnsatzError(f"Ansatz needs at least one layer, got {layers}")
    per_layer = hva_generators(H)
    if not per_layer:
        raise AnsatzError("Hamiltonian has no one- or two-qubit terms to build an ansatz from")
    generators = per_layer * layers
    dropped = sum(1 for s, _ in H if PauliString(s).weight > 2)
    logger.debug(
        f"HVA: {len(per_layer)} generators per layer x {layers} layers, {dropped} many-body terms dropped"
    )
    return Ansatz(generators, initial_params(len(generators), init, scale, seed), layers, reference)


def parameter_shift_gradient(
    ansatz: Ansatz, objective: Callable[[Circuit], float], params: Optional[Sequence[float]] = None
) -> np.ndarray:
    """
    d<O>/d theta_k = <O>(theta_k + pi/4) - <O>(theta_k - pi/4) for e^{i theta R} rotations.

    The objective receives the shifted circuit, so it can be measured on hardware-style paths.
    """
    base = ansatz._resolve(params)
    gradient = np.empty(ansatz.n_params)
    for k in range(ansatz.n_params):
        shift = np.zeros_like(base)
        shift[k] = np.pi / 4
        gradient[k] = objective(ansatz.circuit(base + shift)) - objective(ansatz.circuit(base - shift))
    return gradient
