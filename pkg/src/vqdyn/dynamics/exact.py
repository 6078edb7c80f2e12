import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh

from vqdyn.chem import ChemModel, DipoleCoupling, Pulse
from vqdyn.constants import FS_TO_AU, NORM_DRIFT_TOL, UNITARITY_TOL
from vqdyn.dynamics.trajectory import Observables, last_recorded_step
from vqdyn.errors import PropagationError
from vqdyn.spectral.eigenset import EigenSet

logger = logging.getLogger(__name__)


def evolution_operator(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i h dt) through the eigendecomposition of the Hermitian matrix h."""
    values, vectors = eigh(h)
    return (vectors * np.exp(-1j * values * dt)) @ vectors.conj().T


@dataclass
class ExactRun:
    """
    Full-grid propagation setup. `coupling` is field_sign * dipole, so
    H(t) = h0 + eps(t) * coupling.
    """

    h0: np.ndarray
    coupling: np.ndarray
    pulse: Pulse
    step_fs: float
    initial: np.ndarray
    duration_fs: Optional[float] = None
    stride: int = 1
    time_reversed: bool = False

    @classmethod
    def from_model(
        cls, model: ChemModel, initial: np.ndarray, step_fs: float, duration_fs: Optional[float] = None, stride: int = 1
    ) -> "ExactRun":
        return cls(
            model.hamiltonian.dense(),
            model.dipole.interaction_dense(),
            model.pulse,
            step_fs,
            np.asarray(initial, dtype=complex),
            duration_fs,
            stride,
        )

    @property
    def step(self) -> float:
        return self.step_fs * FS_TO_AU

    @property
    def n_steps(self) -> int:
        duration = self.pulse.duration if self.duration_fs is None else self.duration_fs * FS_TO_AU
        return int(round(duration / self.step))


@dataclass
class ExactTrajectory:
    times: np.ndarray
    states: np.ndarray


def propagate_exact(run: ExactRun) -> ExactTrajectory:
    """
    Piecewise-constant field stepping: each step applies exp(-i H(t_mid) dt) with the
    field sampled at the step midpoint. Every propagator is checked for unitarity.
    """
    if not run.step_fs > 0:
        raise PropagationError(f"Step must be positive, got {run.step_fs} fs")
    dt = -run.step if run.time_reversed else run.step
    dim = run.h0.shape[0]
    identity = np.eye(dim)
    psi = np.asarray(run.initial, dtype=complex).copy()
    start_norm = np.linalg.norm(psi)
    stride = max(1, run.stride)
    n_steps = last_recorded_step(run.n_steps, stride)

    times, states = [0.0], [psi.copy()]
    cached_field, U = None, None
    for n in range(n_steps):
        t_mid = (n + 0.5) * dt
        eps = float(run.pulse(abs(t_mid)) if run.time_reversed else run.pulse(t_mid))
        if eps != cached_field:
            U = evolution_operator(run.h0 + eps * run.coupling, dt)
            defect = np.max(np.abs(U.conj().T @ U - identity))
            if defect > UNITARITY_TOL:
                raise PropagationError(f"Step {n} propagator deviates from unitarity by {defect:.2e}")
            cached_field = eps
        psi = U @ psi
        if (n + 1) % stride == 0:
            times.append((n + 1) * dt)
            states.append(psi.copy())

    drift = abs(np.linalg.norm(psi) - start_norm)
    if drift > NORM_DRIFT_TOL:
        raise PropagationError(f"Norm drifted by {drift:.2e} over {n_steps} steps")
    logger.debug(f"Exact propagation: {n_steps} steps, norm drift {drift:.2e}")
    return ExactTrajectory(np.array(times), np.array(states))


def project_populations(trajectory: ExactTrajectory, eigen: EigenSet) -> np.ndarray:
    """P_i(t) = |<psi_i|Psi(t)>|^2, shape (n_times, n_states)."""
    if eigen.dimension != trajectory.states.shape[1]:
        raise ValueError(
            f"Eigenstates of dimension {eigen.dimension} do not match states of dimension {trajectory.states.shape[1]}"
        )
    return np.abs(trajectory.states @ eigen.states.conj().T) ** 2


def exact_observables(trajectory: ExactTrajectory, eigen: EigenSet, dipole: DipoleCoupling) -> Observables:
    """Eigenbasis amplitudes and d(t) = dipole_sign * <Psi(t)|mu|Psi(t)> in the shared schema."""
    amplitudes = trajectory.states @ eigen.states.conj().T
    mu_psi = dipole.operator.matvec(trajectory.states.T).T
    dipole_signal = dipole.dipole_sign * np.real(np.sum(trajectory.states.conj() * mu_psi, axis=1))
    return Observables(trajectory.times, amplitudes, dipole_signal)
