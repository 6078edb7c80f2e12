import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from vqdyn.errors import CircuitError
from vqdyn.models.models import ShotConfig
from vqdyn.pauli import PauliString, PauliSum
from vqdyn.sim.circuit import Circuit, Gate
from vqdyn.sim.state import StateVector

logger = logging.getLogger(__name__)

# (gate, control): control None acts on both ancilla branches, 0 / 1 only on that branch
ControlledOp = Tuple[Gate, Optional[int]]


def element_rng(cfg: ShotConfig, index: int = 0) -> np.random.Generator:
    """Independent, reproducible sampling stream for one matrix element."""
    return np.random.default_rng([cfg.seed, index])


def _sample_plus_minus(mean: float, shots: int, rng: np.random.Generator) -> float:
    """Estimate <O> for a +-1 valued observable from `shots` outcomes."""
    p = min(max((1.0 + mean) / 2.0, 0.0), 1.0)
    return 2.0 * rng.binomial(shots, p) / shots - 1.0


def expectation(
    state: StateVector, H: PauliSum, cfg: ShotConfig = ShotConfig(), rng: Optional[np.random.Generator] = None
) -> float:
    """
    <psi|H|psi> for a Hermitian sum.

    Sampled mode measures every non-identity term in its own eigenbasis with cfg.shots
    shots; the identity coefficient is added exactly.
    """
    H.require_hermitian()
    if not cfg.sampled:
        return float(np.vdot(state.amplitudes, H.apply(state.amplitudes)).real)

    rng = rng or element_rng(cfg)
    total = 0.0
    for letters, coeff in H:
        string = PauliString(letters)
        if string.weight == 0:
            total += coeff.real
            continue
        mean = float(np.vdot(state.amplitudes, string.apply(state.amplitudes)).real)
        total += coeff.real * _sample_plus_minus(mean, cfg.shots, rng)
    return total


def sampling_std(state: StateVector, H: PauliSum, shots: int) -> float:
    """Standard deviation of the sampled estimator of expectation() at `shots` per term."""
    variance = 0.0
    for letters, coeff in H:
        string = PauliString(letters)
        if string.weight == 0:
            continue
        mean = float(np.vdot(state.amplitudes, string.apply(state.amplitudes)).real)
        variance += coeff.real**2 * (1.0 - mean**2)
    return float(np.sqrt(variance / shots))


def transition_element(bra: StateVector, A: PauliSum, ket: StateVector) -> complex:
    """<bra|A|ket>."""
    if bra.n_qubits != ket.n_qubits or A.n_qubits != ket.n_qubits:
        raise CircuitError("transition_element received mismatched qubit counts")
    return complex(np.vdot(bra.amplitudes, A.apply(ket.amplitudes)))


def hadamard_test(
    prep: Circuit,
    controlled_ops: Sequence[ControlledOp],
    phi: float,
    cfg: ShotConfig = ShotConfig(),
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    Emulate an ancilla Hadamard test.

    The ancilla starts in (|0> + e^{i phi}|1>)/sqrt(2) after `prep` has prepared the system.
    Operations controlled on 0 build the ket branch, those controlled on 1 the bra branch,
    uncontrolled ones act on both. The ancilla X expectation equals Re<bra|ket> for
    phi = 0 and Im<bra|ket> for phi = pi/2.
    """
    if np.isclose(phi, 0.0):
        take_imag = False
    elif np.isclose(phi, np.pi / 2):
        take_imag = True
    else:
        raise CircuitError(f"Hadamard test phase must be 0 or pi/2, got {phi}")

    start = prep.prepare().amplitudes
    ket, bra = start, start
    for position, op in enumerate(controlled_ops):
        try:
            gate, control = op
        except (TypeError, ValueError) as e:
            raise CircuitError(f"Controlled operation {position} is not a (gate, control) pair") from e
        if control not in (None, 0, 1):
            raise CircuitError(f"Controlled operation {position} has invalid control {control!r}")
        if gate.n_qubits != prep.n_qubits:
            raise CircuitError(f"Controlled operation {position} does not act on {prep.n_qubits} qubits")
        if control in (None, 0):
            ket = gate.apply(ket)
        if control in (None, 1):
            bra = gate.apply(bra)

    overlap = complex(np.vdot(bra, ket))
    value = overlap.imag if take_imag else overlap.real
    if not cfg.sampled:
        return value
    return _sample_plus_minus(value, cfg.shots, rng or element_rng(cfg))


def overlap_sq(
    U_i: Circuit, U_j: Circuit, cfg: ShotConfig = ShotConfig(), rng: Optional[np.random.Generator] = None
) -> float:
    """
    |<psi_0|U_i^dagger U_j|psi_0>|^2, prepared as U_i^dagger U_j|psi_0> and projected on |psi_0>.
    """
    if U_i.n_qubits != U_j.n_qubits or U_i.reference != U_j.reference:
        raise CircuitError("overlap_sq needs circuits with the same qubit count and reference")
    reference = U_j.reference_state()
    state = U_i.inverse().apply(U_j.apply(reference))
    probability = min(abs(reference.inner(state)) ** 2, 1.0)
    if not cfg.sampled:
        return probability
    rng = rng or element_rng(cfg)
    return rng.binomial(cfg.shots, probability) / cfg.shots


PHASE_KICK_EPSILONS = (1e-2, 5e-3, 2.5e-3)


def phase_kick_element(
    bra: np.ndarray, values: np.ndarray, ket: np.ndarray, epsilons: Sequence[float] = PHASE_KICK_EPSILONS
) -> complex:
    """
    <bra|V|ket> for a diagonal V from phase kicks alone.

    Each epsilon gives g(eps) = (i / 2 eps) <bra|e^{-i eps V} - e^{i eps V}|ket>, which equals
    the matrix element up to even powers of eps; a polynomial fit in eps^2 through all
    points returns the eps -> 0 intercept, real and imaginary parts separately.
    """
    bra, ket, values = np.asarray(bra), np.asarray(ket), np.asarray(values, dtype=float)
    eps = np.asarray(epsilons, dtype=float)
    if eps.size < 2:
        raise CircuitError("Phase-kick extrapolation needs at least two epsilon values")
    samples = np.array(
        [
            1j / (2 * e) * np.vdot(bra, (np.exp(-1j * e * values) - np.exp(1j * e * values)) * ket)
            for e in eps
        ]
    )
    degree = eps.size - 1
    real = np.polyfit(eps**2, samples.real, degree)[-1]
    imag = np.polyfit(eps**2, samples.imag, degree)[-1]
    return complex(real, imag)
