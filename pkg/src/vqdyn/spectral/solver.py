import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh

from vqdyn.ansatz import Ansatz, build_hva, initial_params
from vqdyn.constants import DENSE_CAP
from vqdyn.dvr import GridOperator
from vqdyn.dynamics.variational import gradient_descent_evolve, imaginary_time_evolve
from vqdyn.errors import ConfigError, ConvergenceError, DenseCapError
from vqdyn.models.models import AnsatzConfig, EigenConfig, IntegratorConfig, Optimizer, ShotConfig
from vqdyn.pauli import PauliSum
from vqdyn.sim import Circuit, element_rng, expectation, overlap_sq
from vqdyn.spectral.eigenset import EigenSet, Provenance, fix_phase

logger = logging.getLogger(__name__)

DENSE_RESIDUAL_TOL = 1e-9


def dense_eigensolve(H: Union[GridOperator, PauliSum, np.ndarray], n_states: int) -> EigenSet:
    """Lowest n_states eigenpairs by full Hermitian diagonalisation, phase-fixed."""
    if isinstance(H, (GridOperator, PauliSum)):
        matrix = H.dense()
    else:
        matrix = np.asarray(H)
        if matrix.shape[0] > DENSE_CAP:
            raise DenseCapError(f"Matrix dimension {matrix.shape[0]} exceeds dense cap {DENSE_CAP}")
    dim = matrix.shape[0]
    if not 1 <= n_states <= dim:
        raise ValueError(f"Requested {n_states} eigenstates of a {dim}-dimensional operator")

    energies, vectors = eigh(matrix, subset_by_index=[0, n_states - 1])
    states = np.array([fix_phase(v) for v in vectors.T])
    residual = max(np.linalg.norm(matrix @ s - e * s) for e, s in zip(energies, states))
    diagnostics = {"residual": float(residual), "warnings": []}
    if residual > DENSE_RESIDUAL_TOL:
        message = f"Dense eigensolver residual {residual:.2e} exceeds {DENSE_RESIDUAL_TOL:.0e}"
        logger.warning(message)
        diagnostics["warnings"].append(message)
    logger.debug(f"Dense eigensolve: lowest energies {energies}")
    return EigenSet(energies, states, Provenance.DENSE, diagnostics=diagnostics)


def gershgorin_bounds(matrix: np.ndarray) -> Tuple[float, float]:
    """Interval containing the spectrum of a Hermitian matrix."""
    matrix = np.asarray(matrix)
    centre = np.real(np.diag(matrix))
    radius = np.sum(np.abs(matrix), axis=1) - np.abs(np.diag(matrix))
    return float(np.min(centre - radius)), float(np.max(centre + radius))


def pauli_bounds(H: PauliSum) -> Tuple[float, float]:
    """c_I -/+ sum of the other coefficient magnitudes."""
    identity = "I" * H.n_qubits
    shift = H.coefficient(identity).real
    spread = sum(abs(c) for s, c in H if s != identity)
    return shift - spread, shift + spread


def default_betas(H: PauliSum, n_states: int) -> List[float]:
    """beta = 2 (E_max - E_min) from the tighter of the Gershgorin and Pauli bounds."""
    lo, hi = pauli_bounds(H)
    if 1 << H.n_qubits <= DENSE_CAP:
        g_lo, g_hi = gershgorin_bounds(H.dense())
        lo, hi = max(lo, g_lo), min(hi, g_hi)
    return [2.0 * (hi - lo)] * max(n_states - 1, 0)


@dataclass(frozen=True, eq=False)
class PenaltyHamiltonian:
    """H_k = H_0 + sum_i beta_i |psi_i><psi_i| with each |psi_i> given by its circuit."""

    base: PauliSum
    deflation: Tuple[Tuple[Circuit, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "deflation", tuple(self.deflation))
        for _, beta in self.deflation:
            if not beta > 0:
                raise ConfigError(f"Penalty weights must be positive, got {beta}", field_path="eigen.betas")

    @property
    def n_qubits(self) -> int:
        return self.base.n_qubits

    @cached_property
    def _projectors(self) -> Tuple[np.ndarray, np.ndarray]:
        states = np.array([circuit.prepare().amplitudes for circuit, _ in self.deflation])
        betas = np.array([beta for _, beta in self.deflation])
        return states, betas

    def penalty_apply(self, amplitudes: np.ndarray) -> np.ndarray:
        states, betas = self._projectors
        if not betas.size:
            return np.zeros_like(amplitudes, dtype=complex)
        weights = betas.reshape((-1,) + (1,) * (np.ndim(amplitudes) - 1)) * (states.conj() @ amplitudes)
        return states.T @ weights

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        return self.base.apply(amplitudes) + self.penalty_apply(amplitudes)

    def dense(self) -> np.ndarray:
        states, betas = self._projectors
        return self.base.dense() + (states.T * betas) @ states.conj()

    def expectation(self, circuit: Circuit, shots: ShotConfig = ShotConfig(), rng=None) -> float:
        """
        <H_0> plus the penalty terms, each overlap measured as |<psi_0|U_i^dagger U|psi_0>|^2.
        Sampled mode draws every overlap from its own `shots` projections.
        """
        value = expectation(circuit.prepare(), self.base, shots, rng)
        for index, (deflated, beta) in enumerate(self.deflation):
            value += beta * overlap_sq(deflated, circuit, shots, element_rng(shots, index + 1))
        return value


def _run_search(ansatz: Ansatz, H, imag_cfg: IntegratorConfig, eigen_cfg: EigenConfig, shots: ShotConfig):
    if eigen_cfg.optimizer == Optimizer.GRADIENT_DESCENT:
        return gradient_descent_evolve(
            ansatz, H, eigen_cfg.step, eigen_cfg.max_iterations, eigen_cfg.plateau_tol, eigen_cfg.patience, shots
        )
    return imaginary_time_evolve(
        ansatz, H, imag_cfg, eigen_cfg.max_iterations, eigen_cfg.plateau_tol, eigen_cfg.patience, shots
    )


def vqd_find(
    H0: PauliSum,
    n_states: int,
    betas: Optional[Sequence[float]] = None,
    imag_cfg: Optional[IntegratorConfig] = None,
    ansatz_cfg: AnsatzConfig = AnsatzConfig(),
    eigen_cfg: EigenConfig = EigenConfig(),
    shots: ShotConfig = ShotConfig(),
    template: Optional[Ansatz] = None,
    reference_energies: Optional[Sequence[float]] = None,
    seed: int = 0,
) -> EigenSet:
    """
    Variational deflation: state k is the imaginary-time minimum of
    H_k = H_0 + sum_{i<k} beta_i |psi_i><psi_i|.

    Each state gets up to 1 + eigen_cfg.restarts seeded attempts; the lowest penalised
    energy is kept. With reference energies and eigen_cfg.tolerance set, a state that
    still misses its reference raises ConvergenceError with diagnostics.
    """
    H0.require_hermitian()
    if n_states < 1:
        raise ValueError(f"n_states must be positive, got {n_states}")
    betas = list(default_betas(H0, n_states) if betas is None else betas)
    if len(betas) < n_states - 1:
        raise ConfigError(
            f"Need {n_states - 1} penalty weights, got {len(betas)}", field_path="eigen.betas"
        )
    imag_cfg = imag_cfg or IntegratorConfig(step=eigen_cfg.step, scheme=eigen_cfg.scheme)
    if template is None:
        template = build_hva(H0, ansatz_cfg.layers, ansatz_cfg.init, ansatz_cfg.init_scale, seed, ansatz_cfg.reference)

    found: List[Ansatz] = []
    energies: List[float] = []
    diagnostics = {
        "iterations": [],
        "converged": [],
        "monotonic": [],
        "attempts": [],
        "betas": betas[: n_states - 1],
        "warnings": [],
    }
    exact = ShotConfig()

    for k in range(n_states):
        H_k = H0 if k == 0 else PenaltyHamiltonian(H0, tuple((a.circuit(), b) for a, b in zip(found, betas)))
        best, best_energy = None, np.inf
        attempts = 0
        for attempt in range(1 + eigen_cfg.restarts):
            attempts += 1
            start = template.with_params(
                initial_params(template.n_params, ansatz_cfg.init, ansatz_cfg.init_scale, seed + 1000 * k + attempt)
            )
            result = _run_search(start, H_k, imag_cfg, eigen_cfg, shots)
            if result.energy < best_energy:
                best, best_energy = result, result.energy

            e0 = expectation(result.ansatz.prepare(), H0, exact)
            if reference_energies is not None and eigen_cfg.tolerance is not None:
                if abs(e0 - reference_energies[k]) <= eigen_cfg.tolerance:
                    best, best_energy = result, result.energy
                    break
            elif result.converged:
                break
            logger.warning(f"State {k}: attempt {attempt + 1} did not converge (E = {e0:.8f}); restarting")

        energy = expectation(best.ansatz.prepare(), H0, exact)
        if reference_energies is not None and eigen_cfg.tolerance is not None:
            error = abs(energy - reference_energies[k])
            if error > eigen_cfg.tolerance:
                raise ConvergenceError(
                    f"State {k} stalled at E = {energy:.8f}, {error:.2e} above reference after {attempts} attempts",
                    {
                        "state": k,
                        "energy": energy,
                        "reference": float(reference_energies[k]),
                        "iterations": best.iterations,
                        "attempts": attempts,
                        "energy_tail": best.energies[-5:].tolist(),
                    },
                )
        elif not best.converged:
            message = f"State {k}: iteration cap {eigen_cfg.max_iterations} reached without plateau"
            logger.warning(message)
            diagnostics["warnings"].append(message)

        found.append(best.ansatz)
        energies.append(energy)
        diagnostics["iterations"].append(best.iterations)
        diagnostics["converged"].append(best.converged)
        diagnostics["monotonic"].append(best.monotonic)
        diagnostics["attempts"].append(attempts)
        logger.info(f"Eigenstate {k}: E = {energy:.10f} hartree ({best.iterations} iterations)")

    states = np.array([fix_phase(a.prepare().amplitudes) for a in found])
    eigen = EigenSet(np.array(energies), states, Provenance.VQD, found, diagnostics)
    overlap = eigen.max_offdiagonal_overlap()
    diagnostics["max_overlap"] = overlap
    if overlap > 1e-4:
        message = f"VQD states overlap up to {overlap:.2e}"
        logger.warning(message)
        diagnostics["warnings"].append(message)
    return eigen
