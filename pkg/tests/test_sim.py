import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from vqdyn.errors import CircuitError
from vqdyn.models import Reference, ShotConfig, ShotMode
from vqdyn.pauli import PauliString, PauliSum
from vqdyn.sim import (
    Circuit,
    PauliGate,
    Rotation,
    StateVector,
    apply_rotation,
    element_rng,
    expectation,
    hadamard_test,
    overlap_sq,
    phase_kick_element,
    prepare_basis,
    prepare_plus,
    sampling_std,
    transition_element,
)

SAMPLED = ShotConfig(mode=ShotMode.SAMPLED, shots=4000, seed=7)


def random_state(n_qubits: int, seed: int = 0) -> StateVector:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector(v / np.linalg.norm(v))


def test_plus_state_amplitudes():
    state = prepare_plus(3)
    assert_allclose(state.amplitudes, np.full(8, 8**-0.5))
    assert abs(state.norm() - 1.0) < 1e-12


def test_basis_state_and_bad_index():
    assert_allclose(prepare_basis(2, 3).amplitudes, [0, 0, 0, 1])
    with pytest.raises(CircuitError):
        prepare_basis(2, 4)


def test_rotation_matches_matrix_exponential():
    generator = PauliString("XZY")
    state = random_state(3, seed=1)
    rotated = apply_rotation(state, generator, 0.37)
    assert_allclose(rotated.amplitudes, expm(1j * 0.37 * generator.dense()) @ state.amplitudes, atol=1e-12)
    assert abs(rotated.norm() - 1.0) < 1e-10


def test_rotation_qubit_mismatch():
    with pytest.raises(CircuitError):
        apply_rotation(prepare_plus(2), PauliString("XXX"), 0.1)


def test_norm_preserved_over_many_gates():
    rng = np.random.default_rng(4)
    gates = [Rotation(PauliString(s), float(a)) for s, a in zip(["XI", "ZZ", "IY", "YX"] * 25, rng.normal(size=100))]
    state = Circuit(2, Reference.PLUS, gates).prepare()
    assert abs(state.norm() - 1.0) < 1e-10


def test_circuit_inverse_restores_reference():
    circuit = Circuit(2, Reference.ZERO, (Rotation(PauliString("XY"), 0.4), PauliGate(PauliString("ZI"), 1j)))
    state = circuit.inverse().apply(circuit.prepare())
    assert_allclose(state.amplitudes, prepare_basis(2, 0).amplitudes, atol=1e-12)


def test_pauli_gate_phase_checked():
    with pytest.raises(CircuitError):
        PauliGate(PauliString("X"), 2.0)


def test_exact_expectation_matches_dense():
    H = PauliSum({"XZ": 0.5, "YY": -0.25, "II": 1.0}, 2)
    state = random_state(2, seed=3)
    exact = np.vdot(state.amplitudes, H.dense() @ state.amplitudes).real
    assert abs(expectation(state, H) - exact) < 1e-12


def test_sampled_expectation_within_five_sigma():
    H = PauliSum({"XZ": 0.5, "ZI": 0.3, "II": 1.0}, 2)
    state = random_state(2, seed=5)
    exact = expectation(state, H)
    sigma = sampling_std(state, H, SAMPLED.shots)
    estimate = expectation(state, H, SAMPLED)
    assert abs(estimate - exact) <= 5 * sigma + 1e-12


def test_sampled_expectation_is_reproducible():
    H = PauliSum({"XZ": 0.5, "ZI": 0.3}, 2)
    state = random_state(2, seed=5)
    first = expectation(state, H, SAMPLED, element_rng(SAMPLED, 3))
    second = expectation(state, H, SAMPLED, element_rng(SAMPLED, 3))
    assert first == second


def test_transition_element():
    A = PauliSum({"XI": 1.0, "ZZ": 0.5j}, 2)
    bra, ket = random_state(2, seed=1), random_state(2, seed=2)
    expected = np.vdot(bra.amplitudes, A.dense() @ ket.amplitudes)
    assert abs(transition_element(bra, A, ket) - expected) < 1e-12


def test_hadamard_test_real_and_imaginary_parts():
    prep = Circuit(2, Reference.PLUS, (Rotation(PauliString("XY"), 0.3),))
    ops = [(PauliGate(PauliString("XI")), 0), (Rotation(PauliString("ZZ"), 0.2), None), (PauliGate(PauliString("IY")), 1)]
    psi = prep.prepare().amplitudes
    R = expm(1j * 0.2 * PauliString("ZZ").dense())
    ket = R @ PauliString("XI").dense() @ psi
    bra = R @ PauliString("IY").dense() @ psi
    overlap = np.vdot(bra, ket)
    assert abs(hadamard_test(prep, ops, 0.0) - overlap.real) < 1e-12
    assert abs(hadamard_test(prep, ops, np.pi / 2) - overlap.imag) < 1e-12


def test_hadamard_test_rejects_bad_input():
    prep = Circuit(1)
    with pytest.raises(CircuitError):
        hadamard_test(prep, [], 0.3)
    with pytest.raises(CircuitError):
        hadamard_test(prep, [(PauliGate(PauliString("X")), 2)], 0.0)
    with pytest.raises(CircuitError):
        hadamard_test(prep, [PauliGate(PauliString("X"))], 0.0)


def test_overlap_sq_identical_and_orthogonal():
    a = Circuit(1, Reference.ZERO)
    b = Circuit(1, Reference.ZERO, (PauliGate(PauliString("X")),))
    assert abs(overlap_sq(a, a) - 1.0) < 1e-12
    assert abs(overlap_sq(a, b)) < 1e-12


def test_phase_kick_matches_direct_element():
    rng = np.random.default_rng(8)
    bra, ket = random_state(3, seed=4).amplitudes, random_state(3, seed=6).amplitudes
    values = rng.uniform(-1.0, 1.0, size=8)
    direct = np.vdot(bra, values * ket)
    assert abs(phase_kick_element(bra, values, ket) - direct) < 1e-8
