"""
McLachlan variational dynamics of ansatz parameters.

With M_kl = Re<d_k psi|d_l psi> and f_k = <psi|H|d_k psi> the parameter velocities are

    real time:       (M + lambda I) theta_dot = REAL_SIGN * Im f
    imaginary time:  (M + lambda I) theta_dot = IMAG_SIGN * Re f

for e^{+i theta R} rotations. The signs come from calibrate_sign_convention().
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from vqdyn.ansatz import Ansatz, parameter_shift_gradient
from vqdyn.constants import IMAG_MAX_ITERATIONS, IMAG_PLATEAU_PATIENCE, IMAG_PLATEAU_TOL, RIDGE_LAMBDA
from vqdyn.dynamics.trajectory import last_recorded_step
from vqdyn.errors import IntegrationError
from vqdyn.models.models import EvaluationPath, IntegratorConfig, Reference, Scheme, ShotConfig
from vqdyn.pauli import PauliString, PauliSum
from vqdyn.sim import (
    Circuit,
    PauliGate,
    Rotation,
    element_rng,
    expectation,
    hadamard_test,
    phase_kick_element,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class InstantHamiltonian:
    """H_0 + strength * coupling at one instant, applied without re-encoding."""

    h0: PauliSum
    coupling: PauliSum
    strength: float

    @property
    def n_qubits(self) -> int:
        return self.h0.n_qubits

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        result = self.h0.apply(amplitudes)
        if self.strength:
            result = result + self.strength * self.coupling.apply(amplitudes)
        return result

    def to_pauli(self) -> PauliSum:
        return self.h0 + self.coupling * self.strength


@dataclass(frozen=True, eq=False)
class DrivenHamiltonian:
    """H(t) = H_0 + field(t) * coupling; the coupling already carries the model's sign."""

    h0: PauliSum
    coupling: PauliSum
    field: Callable[[float], float]

    def __post_init__(self):
        self.h0.require_hermitian()
        self.coupling.require_hermitian()

    @property
    def n_qubits(self) -> int:
        return self.h0.n_qubits

    def at(self, t: float) -> InstantHamiltonian:
        return InstantHamiltonian(self.h0, self.coupling, float(self.field(t)))


Operator = Union[PauliSum, InstantHamiltonian]
Hamiltonian = Union[PauliSum, DrivenHamiltonian]


def _at(H, t: float):
    return H.at(t) if isinstance(H, DrivenHamiltonian) else H


def _measurable(H) -> Tuple[PauliSum, Optional[Callable[[np.ndarray], np.ndarray]]]:
    """Pauli part evaluated term by term, plus an optional directly-applied remainder."""
    if isinstance(H, PauliSum):
        return H, None
    if isinstance(H, InstantHamiltonian):
        return H.to_pauli(), None
    return H.base, H.penalty_apply


def operator_expectation(circuit: Circuit, H, shots: ShotConfig = ShotConfig(), rng=None) -> float:
    """<psi|H|psi> for the state a circuit prepares; penalty Hamiltonians measure their own overlaps."""
    if hasattr(H, "expectation"):
        return H.expectation(circuit, shots, rng)
    state = circuit.prepare()
    if not shots.sampled:
        return float(np.vdot(state.amplitudes, H.apply(state.amplitudes)).real)
    pauli, _ = _measurable(H)
    return expectation(state, pauli, shots, rng)


@dataclass
class McLachlanSystem:
    M: np.ndarray
    f: np.ndarray
    ridge: float = RIDGE_LAMBDA

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve (M + ridge I) x = rhs by Cholesky factorisation."""
        regularised = self.M + self.ridge * np.eye(self.M.shape[0])
        try:
            factor = cho_factor(regularised)
            solution = cho_solve(factor, rhs)
        except (LinAlgError, ValueError) as e:
            raise IntegrationError(f"McLachlan solve failed after regularisation (ridge={self.ridge}): {e}") from e
        if not np.all(np.isfinite(solution)):
            raise IntegrationError("McLachlan solve produced non-finite parameter velocities")
        return solution


def _run_parallel(tasks: List[Callable[[], float]], max_threads: int) -> List[float]:
    if max_threads <= 1 or len(tasks) < 2:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=max_threads) as pool:
        return list(pool.map(lambda task: task(), tasks))


def _rotations(ansatz: Ansatz, params: np.ndarray) -> List[Rotation]:
    return [Rotation(g, float(t)) for g, t in zip(ansatz.generators, params)]


def _with_insertions(rotations: List[Rotation], inserts: dict) -> list:
    """Rotation sequence with controlled Pauli gates after given rotation indices."""
    ops = []
    for index, rotation in enumerate(rotations):
        ops.append((rotation, None))
        for gate, control in inserts.get(index, ()):
            ops.append((gate, control))
    return ops


def _reference_circuit(ansatz: Ansatz) -> Circuit:
    return Circuit(ansatz.n_qubits, ansatz.reference)


def _M_hadamard(ansatz: Ansatz, params: np.ndarray, shots: ShotConfig, max_threads: int) -> np.ndarray:
    n = ansatz.n_params
    prep = _reference_circuit(ansatz)
    rotations = _rotations(ansatz, params)
    tasks, pairs = [], []
    for k in range(n):
        for l in range(k, n):
            inserts = {}
            inserts.setdefault(k, []).append((PauliGate(ansatz.generators[k]), 1))
            inserts.setdefault(l, []).append((PauliGate(ansatz.generators[l]), 0))
            ops = _with_insertions(rotations, inserts)
            rng_index = k * n + l
            tasks.append(
                lambda ops=ops, i=rng_index: hadamard_test(prep, ops, 0.0, shots, element_rng(shots, i))
            )
            pairs.append((k, l))
    values = _run_parallel(tasks, max_threads)
    M = np.empty((n, n))
    for (k, l), value in zip(pairs, values):
        M[k, l] = M[l, k] = value
    return M


def _f_hadamard(ansatz: Ansatz, H: PauliSum, params: np.ndarray, shots: ShotConfig, max_threads: int) -> np.ndarray:
    n = ansatz.n_params
    prep = _reference_circuit(ansatz)
    rotations = _rotations(ansatz, params)
    offset = n * n
    tasks, keys = [], []
    for j, (letters, coeff) in enumerate(H):
        term = PauliGate(PauliString(letters))
        for k in range(n):
            ops = _with_insertions(rotations, {k: [(PauliGate(ansatz.generators[k]), 0)]})
            ops.append((term, 0))
            for part, phi in enumerate((0.0, np.pi / 2)):
                rng_index = offset + 2 * (j * n + k) + part
                tasks.append(
                    lambda ops=ops, phi=phi, i=rng_index: hadamard_test(prep, ops, phi, shots, element_rng(shots, i))
                )
                keys.append((coeff, k, part))
    values = _run_parallel(tasks, max_threads)
    f = np.zeros(n, dtype=complex)
    for (coeff, k, part), value in zip(keys, values):
        # f_k = i sum_j c_j <psi|h_j R_k-inserted circuit>
        f[k] += 1j * coeff * (value if part == 0 else 1j * value)
    return f


def assemble_M(
    ansatz: Ansatz,
    shots: ShotConfig = ShotConfig(),
    path: EvaluationPath = EvaluationPath.DIRECT,
    params: Optional[np.ndarray] = None,
    max_threads: int = 1,
) -> np.ndarray:
    """
    M_kl = Re<d_k psi|d_l psi>.

    The direct path contracts derivative states; the Hadamard path emulates one ancilla
    circuit per element with R_k on the bra branch and R_l on the ket branch. Sampled
    shot configurations always take the Hadamard path.
    """
    params = ansatz.params if params is None else np.asarray(params, dtype=float)
    if path == EvaluationPath.HADAMARD or shots.sampled:
        return _M_hadamard(ansatz, params, shots, max_threads)
    D = ansatz.derivative_states(params)
    return np.real(D.conj() @ D.T)


def assemble_f(
    ansatz: Ansatz,
    H,
    shots: ShotConfig = ShotConfig(),
    path: EvaluationPath = EvaluationPath.DIRECT,
    params: Optional[np.ndarray] = None,
    max_threads: int = 1,
) -> np.ndarray:
    """f_k = <psi|H|d_k psi>, term by term on the Hadamard path."""
    params = ansatz.params if params is None else np.asarray(params, dtype=float)
    if path == EvaluationPath.HADAMARD or shots.sampled:
        pauli, remainder = _measurable(H)
        pauli.require_hermitian()
        f = _f_hadamard(ansatz, pauli, params, shots, max_threads)
        if remainder is not None:
            psi = ansatz.prepare(params).amplitudes
            f = f + ansatz.derivative_states(params) @ np.conj(remainder(psi))
        return f
    psi = ansatz.prepare(params).amplitudes
    D = ansatz.derivative_states(params)
    return D @ np.conj(H.apply(psi))


def mclachlan_system(
    ansatz: Ansatz, H, cfg: IntegratorConfig, shots: ShotConfig = ShotConfig(), params=None
) -> McLachlanSystem:
    M = assemble_M(ansatz, shots, cfg.path, params, cfg.max_threads)
    f = assemble_f(ansatz, H, shots, cfg.path, params, cfg.max_threads)
    return McLachlanSystem(M, f, cfg.ridge)


@dataclass(frozen=True)
class SignConvention:
    real_time: float
    imag_time: float


@lru_cache(maxsize=1)
def calibrate_sign_convention() -> SignConvention:
    """
    Fix the velocity signs from two single-qubit cases with e^{i theta X}|0>.

    Real time: H = X must give theta(t) = -t, so theta_dot = -1 at theta = 0.
    Imaginary time: H = Z at theta = 0.1 must lower <Z> = cos(2 theta).
    """
    generator = PauliString("X")
    real_ansatz = Ansatz((generator,), np.zeros(1), reference=Reference.ZERO)
    M = assemble_M(real_ansatz)[0, 0]
    f = assemble_f(real_ansatz, PauliSum.single("X"))[0]
    real_sign = float(np.sign(-1.0 / (f.imag / M)))

    imag_ansatz = real_ansatz.with_params([0.1])
    M = assemble_M(imag_ansatz)[0, 0]
    f = assemble_f(imag_ansatz, PauliSum.single("Z"))[0]
    energy_slope = 2.0 * f.real
    velocity = f.real / M
    imag_sign = float(-np.sign(velocity * energy_slope))
    logger.debug(f"Calibrated McLachlan signs: real={real_sign:+.0f}, imaginary={imag_sign:+.0f}")
    return SignConvention(real_sign, imag_sign)


def real_time_velocity(ansatz: Ansatz, H: Operator, cfg: IntegratorConfig, shots: ShotConfig, params) -> np.ndarray:
    system = mclachlan_system(ansatz, H, cfg, shots, params)
    return system.solve(calibrate_sign_convention().real_time * system.f.imag)


def imag_time_velocity(ansatz: Ansatz, H, cfg: IntegratorConfig, shots: ShotConfig, params) -> np.ndarray:
    system = mclachlan_system(ansatz, H, cfg, shots, params)
    return system.solve(calibrate_sign_convention().imag_time * system.f.real)


def _explicit_step(velocity: Callable[[np.ndarray, float], np.ndarray], theta: np.ndarray, t: float, h: float, scheme: Scheme):
    if scheme == Scheme.EULER:
        return theta + h * velocity(theta, t)
    k1 = velocity(theta, t)
    k2 = velocity(theta + 0.5 * h * k1, t + 0.5 * h)
    k3 = velocity(theta + 0.5 * h * k2, t + 0.5 * h)
    k4 = velocity(theta + h * k3, t + h)
    return theta + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def step_real_time(
    ansatz: Ansatz, H: Hamiltonian, cfg: IntegratorConfig, t: float = 0.0, shots: ShotConfig = ShotConfig()
) -> np.ndarray:
    """
    One explicit real-time step from time t; returns the new parameters.

    Euler samples the field at t, rk4 at its substage times.
    """
    return _explicit_step(
        lambda theta, time: real_time_velocity(ansatz, _at(H, time), cfg, shots, theta),
        ansatz.params,
        t,
        cfg.step,
        cfg.scheme,
    )


def step_imag_time(ansatz: Ansatz, H, cfg: IntegratorConfig, shots: ShotConfig = ShotConfig()) -> np.ndarray:
    """One imaginary-time descent step; returns the new parameters."""
    return _explicit_step(
        lambda theta, _: imag_time_velocity(ansatz, H, cfg, shots, theta),
        ansatz.params,
        0.0,
        cfg.step,
        cfg.scheme,
    )


@dataclass
class VariationalTrajectory:
    """Real-time output samples; times in atomic units."""

    times: np.ndarray
    params: np.ndarray
    states: np.ndarray
    energies: np.ndarray


def propagate_real_time(
    ansatz: Ansatz,
    H: Hamiltonian,
    cfg: IntegratorConfig,
    n_steps: int,
    t0: float = 0.0,
    stride: int = 1,
    shots: ShotConfig = ShotConfig(),
) -> VariationalTrajectory:
    """Integrate the parameters for n_steps, recording every `stride`-th step."""
    stride = max(1, stride)
    n_steps = last_recorded_step(n_steps, stride)
    times, params, states, energies = [], [], [], []
    current = ansatz

    def record(step: int):
        t = t0 + step * cfg.step
        circuit = current.circuit()
        times.append(t)
        params.append(np.array(current.params))
        states.append(circuit.prepare().amplitudes)
        energies.append(operator_expectation(circuit, _at(H, t), shots))

    record(0)
    for step in range(n_steps):
        new_params = step_real_time(current, H, cfg, t0 + step * cfg.step, shots)
        current = current.with_params(new_params)
        if (step + 1) % stride == 0:
            record(step + 1)
        if (step + 1) % max(1, n_steps // 10) == 0:
            logger.debug(f"Real-time VQA step {step + 1}/{n_steps}")

    return VariationalTrajectory(np.array(times), np.array(params), np.array(states), np.array(energies))


@dataclass
class EigenSearchResult:
    ansatz: Ansatz
    energies: np.ndarray
    converged: bool
    iterations: int
    monotonic: bool = True
    history: List[float] = field(default_factory=list)

    @property
    def energy(self) -> float:
        return float(self.energies[-1])


def _search(
    ansatz: Ansatz,
    update: Callable[[Ansatz], np.ndarray],
    energy: Callable[[Ansatz], float],
    max_iterations: int,
    plateau_tol: float,
    patience: int,
    label: str,
) -> EigenSearchResult:
    energies = [energy(ansatz)]
    calm, monotonic, converged = 0, True, False
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        ansatz = ansatz.with_params(update(ansatz))
        energies.append(energy(ansatz))
        delta = energies[-1] - energies[-2]
        if delta > 1e-9:
            monotonic = False
            logger.debug(f"{label}: energy rose by {delta:.3e} at iteration {iteration}")
        calm = calm + 1 if abs(delta) < plateau_tol else 0
        if calm >= patience:
            converged = True
            break
    logger.debug(f"{label}: E = {energies[-1]:.10f} after {iteration} iterations (converged={converged})")
    return EigenSearchResult(ansatz, np.array(energies), converged, iteration, monotonic)


def imaginary_time_evolve(
    ansatz: Ansatz,
    H,
    cfg: IntegratorConfig,
    max_iterations: int = IMAG_MAX_ITERATIONS,
    plateau_tol: float = IMAG_PLATEAU_TOL,
    patience: int = IMAG_PLATEAU_PATIENCE,
    shots: ShotConfig = ShotConfig(),
) -> EigenSearchResult:
    """
    Imaginary-time flow towards the lowest state of H reachable by the ansatz.

    Stops after max_iterations or once |dE| < plateau_tol for `patience` steps in a row.
    """
    return _search(
        ansatz,
        lambda a: step_imag_time(a, H, cfg, shots),
        lambda a: operator_expectation(a.circuit(), H, shots),
        max_iterations,
        plateau_tol,
        patience,
        "Imaginary-time VQA",
    )


def gradient_descent_evolve(
    ansatz: Ansatz,
    H,
    learning_rate: float,
    max_iterations: int = IMAG_MAX_ITERATIONS,
    plateau_tol: float = IMAG_PLATEAU_TOL,
    patience: int = IMAG_PLATEAU_PATIENCE,
    shots: ShotConfig = ShotConfig(),
) -> EigenSearchResult:
    """Plain gradient descent with parameter-shift energy gradients; no M matrix needed."""

    def objective(circuit: Circuit) -> float:
        return operator_expectation(circuit, H, shots)

    return _search(
        ansatz,
        lambda a: a.params - learning_rate * parameter_shift_gradient(a, objective),
        lambda a: objective(a.circuit()),
        max_iterations,
        plateau_tol,
        patience,
        "Gradient descent",
    )


def potential_force_phase_kick(ansatz: Ansatz, potential_diagonal: np.ndarray, params=None) -> np.ndarray:
    """
    <psi|V|d_k psi> for a diagonal potential, from phase kicks only.

    Cross-checks the potential contribution to f against the direct contraction.
    """
    psi = ansatz.prepare(params).amplitudes
    D = ansatz.derivative_states(params)
    return np.array([phase_kick_element(psi, potential_diagonal, d) for d in D])
