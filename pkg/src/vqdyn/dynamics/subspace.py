import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from vqdyn.chem import DipoleCoupling
from vqdyn.constants import NORM_DRIFT_TOL, SUBSTEP_PHASE
from vqdyn.dynamics.trajectory import Observables
from vqdyn.errors import StepSizeError
from vqdyn.models.models import DipoleRoute
from vqdyn.pauli import encode_operator
from vqdyn.sim import StateVector, phase_kick_element, transition_element
from vqdyn.spectral.eigenset import EigenSet

logger = logging.getLogger(__name__)


@dataclass
class SubspaceModel:
    """
    Driven Hamiltonian restricted to N_s eigenstates:
    H(t) = diag(E) + field_sign * eps(t) * dipole_sub.
    """

    energies: np.ndarray
    dipole_sub: np.ndarray
    field: Callable[[float], float]
    field_sign: float = -1.0
    dipole_sign: float = 1.0
    coeffs: Optional[np.ndarray] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        self.dipole_sub = np.asarray(self.dipole_sub, dtype=complex)
        n = self.energies.size
        if self.dipole_sub.shape != (n, n):
            raise ValueError(f"Dipole block has shape {self.dipole_sub.shape}, expected ({n}, {n})")
        if not np.allclose(self.dipole_sub, self.dipole_sub.conj().T, atol=1e-10, rtol=0.0):
            raise ValueError("Projected dipole block is not Hermitian")
        if self.coeffs is None:
            self.coeffs = np.eye(n, dtype=complex)[0]
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if abs(np.linalg.norm(self.coeffs) - 1.0) > 1e-10:
            raise ValueError("Initial subspace amplitudes must be normalised")

    @property
    def n_states(self) -> int:
        return self.energies.size

    def hamiltonian(self, t: float) -> np.ndarray:
        return np.diag(self.energies) + self.field_sign * self.field(t) * self.dipole_sub


def project_hamiltonian(
    eigen: EigenSet,
    dipole: DipoleCoupling,
    field: Callable[[float], float],
    route: DipoleRoute = DipoleRoute.DIRECT,
    initial: Optional[np.ndarray] = None,
) -> SubspaceModel:
    """
    Project onto the retained eigenstates. The diagonal block is the energies; dipole
    elements come from transition_element or, for diagonal dipoles, from phase kicks.
    """
    n = eigen.count
    mu = np.zeros((n, n), dtype=complex)
    if route == DipoleRoute.PHASE_KICK:
        values = dipole.operator.diagonal()
        for i in range(n):
            for j in range(i, n):
                mu[i, j] = phase_kick_element(eigen.states[i], values, eigen.states[j])
    else:
        mu_pauli = encode_operator(dipole.operator)
        vectors = [StateVector(s) for s in eigen.states]
        for i in range(n):
            for j in range(i, n):
                mu[i, j] = transition_element(vectors[i], mu_pauli, vectors[j])
    upper = np.triu_indices(n, 1)
    mu[(upper[1], upper[0])] = mu[upper].conj()
    mu[np.diag_indices(n)] = mu.diagonal().real
    logger.debug(f"Projected dipole ({route.value}): diagonal {mu.diagonal().real}")
    return SubspaceModel(eigen.energies, mu, field, dipole.field_sign, dipole.dipole_sign, initial)


@dataclass
class SubspaceTrajectory:
    times: np.ndarray
    coeffs: np.ndarray


def _substeps(model: SubspaceModel, shifted: np.ndarray, dt: float, peak_field: float) -> int:
    bound = np.max(np.abs(shifted)) + peak_field * np.linalg.norm(model.dipole_sub, 2)
    return max(1, int(np.ceil(bound * abs(dt) / SUBSTEP_PHASE)))


def propagate_subspace(
    model: SubspaceModel, t_grid: np.ndarray, peak_field: Optional[float] = None
) -> SubspaceTrajectory:
    """
    rk4 integration of i dc/dt = H(t) c between consecutive output times.

    Energies are shifted by their mean (the phase is restored at every output) and each
    interval is split so that |H| h stays below SUBSTEP_PHASE; the field is sampled at
    the rk4 substage times.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be a strictly increasing one-dimensional array")
    if peak_field is None:
        peak_field = abs(getattr(model.field, "epsilon0", 0.0))

    mean = float(np.mean(model.energies))
    shifted = model.energies - mean
    mu = model.field_sign * model.dipole_sub
    c = model.coeffs.copy()
    out = np.empty((t_grid.size, model.n_states), dtype=complex)
    out[0] = c * np.exp(-1j * mean * t_grid[0])

    def rhs(vec, eps):
        return -1j * (shifted * vec + eps * (mu @ vec))

    for n in range(1, t_grid.size):
        t0, dt = t_grid[n - 1], t_grid[n] - t_grid[n - 1]
        m = _substeps(model, shifted, dt, peak_field)
        h = dt / m
        stage_times = t0 + h * np.arange(0, 2 * m + 1) / 2
        eps = np.broadcast_to(np.asarray(model.field(stage_times), dtype=float), stage_times.shape)
        for s in range(m):
            e0, e_half, e1 = eps[2 * s], eps[2 * s + 1], eps[2 * s + 2]
            k1 = rhs(c, e0)
            k2 = rhs(c + 0.5 * h * k1, e_half)
            k3 = rhs(c + 0.5 * h * k2, e_half)
            k4 = rhs(c + h * k3, e1)
            c = c + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[n] = c * np.exp(-1j * mean * t_grid[n])

    drift = abs(np.linalg.norm(c) - np.linalg.norm(model.coeffs))
    if drift > NORM_DRIFT_TOL:
        raise StepSizeError(
            f"Subspace norm drifted by {drift:.2e} (limit {NORM_DRIFT_TOL:.0e}); use a smaller step"
        )
    logger.debug(f"Subspace propagation over {t_grid.size} outputs, norm drift {drift:.2e}")
    return SubspaceTrajectory(t_grid, out)


def observables(model: SubspaceModel, trajectory: SubspaceTrajectory) -> Observables:
    """Populations |c_i|^2 and d(t) = dipole_sign * c^dagger dipole_sub c."""
    c = trajectory.coeffs
    dipole = model.dipole_sign * np.real(np.einsum("ti,ij,tj->t", c.conj(), model.dipole_sub, c))
    return Observables(trajectory.times, c, dipole)
