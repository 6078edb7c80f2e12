import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from vqdyn.ansatz import Ansatz
from vqdyn.chem import build_model
from vqdyn.dvr import DVRGrid, assemble_hamiltonian
from vqdyn.errors import ConfigError, ConvergenceError
from vqdyn.models import EigenConfig, ModelConfig, ModelKind, Reference, ShotConfig, ShotMode
from vqdyn.pauli import PauliString, PauliSum, encode_operator
from vqdyn.sim import Circuit, PauliGate, Rotation, prepare_basis
from vqdyn.spectral import (
    EigenSet,
    PenaltyHamiltonian,
    Provenance,
    default_betas,
    dense_eigensolve,
    fix_phase,
    gershgorin_bounds,
    pauli_bounds,
    vqd_find,
)

Z = PauliSum.single("Z")
X_TEMPLATE = Ansatz((PauliString("X"),), [0.0], reference=Reference.ZERO)
FAST_EIGEN = EigenConfig(step=0.1, max_iterations=400, restarts=0, tolerance=1e-4)


def test_dense_harmonic_oscillator():
    grid = DVRGrid(1, 64, -8.0, 8.0, 1.0)
    eigen = dense_eigensolve(assemble_hamiltonian(grid, lambda x: 0.5 * x**2), 4)
    assert eigen.provenance == Provenance.DENSE
    assert_allclose(eigen.energies, [0.5, 1.5, 2.5, 3.5], atol=1e-6)
    assert_allclose(eigen.overlaps(), np.eye(4), atol=1e-10)


def test_dense_eigensolve_accepts_pauli_and_arrays():
    H = PauliSum({"ZI": 1.0, "XX": 0.3}, 2)
    from_pauli = dense_eigensolve(H, 2)
    from_array = dense_eigensolve(H.dense(), 2)
    assert_allclose(from_pauli.energies, from_array.energies)
    assert_allclose(from_pauli.energies, np.linalg.eigvalsh(H.dense())[:2], atol=1e-12)
    with pytest.raises(ValueError):
        dense_eigensolve(H, 5)


def test_fix_phase_makes_pivot_real_positive():
    v = fix_phase(np.array([0.1j, -0.9, 0.2]))
    assert v[1].real > 0 and abs(v[1].imag) < 1e-15


def test_bounds_contain_spectrum():
    model = build_model(ModelConfig())
    H = encode_operator(model.hamiltonian)
    spectrum = np.linalg.eigvalsh(H.dense())
    for lo, hi in (pauli_bounds(H), gershgorin_bounds(H.dense())):
        assert lo <= spectrum[0] + 1e-12
        assert hi >= spectrum[-1] - 1e-12
    betas = default_betas(H, 3)
    assert len(betas) == 2
    assert betas[0] > spectrum[-1] - spectrum[0]


def test_eigenset_reorders_ascending(caplog):
    states = np.eye(2)
    with caplog.at_level(logging.WARNING):
        eigen = EigenSet(np.array([1.0, -1.0]), states, Provenance.DENSE)
    assert_allclose(eigen.energies, [-1.0, 1.0])
    assert_allclose(eigen.states[0], [0.0, 1.0])
    assert "ascending" in caplog.text


def test_eigenset_manifest_round_trip(tmp_path):
    eigen = dense_eigensolve(PauliSum({"ZI": 1.0, "XY": 0.3, "IX": 0.2}, 2), 3)
    loaded = EigenSet.load(eigen.save(tmp_path / "eigenset.json"))
    assert loaded.provenance == Provenance.DENSE
    assert_allclose(loaded.energies, eigen.energies)
    assert_allclose(loaded.states, eigen.states)
    assert loaded.truncated(2).count == 2


def test_eigenset_manifest_errors(tmp_path):
    with pytest.raises(ConfigError):
        EigenSet.load(tmp_path / "missing.json")
    with pytest.raises(ConfigError):
        EigenSet.from_manifest({"energies": [0.0]})


def test_penalty_hamiltonian_dense_and_expectation():
    flip = Circuit(1, Reference.ZERO, (PauliGate(PauliString("X")),))
    H = PenaltyHamiltonian(Z, ((flip, 3.0),))
    expected = Z.dense() + 3.0 * np.outer([0, 1], [0, 1])
    assert_allclose(H.dense(), expected, atol=1e-14)
    one = prepare_basis(1, 1)
    assert abs(H.expectation(flip) - 2.0) < 1e-12
    assert_allclose(H.apply(one.amplitudes), expected @ one.amplitudes, atol=1e-14)


def test_penalty_expectation_measures_overlaps_on_circuits():
    flip = Circuit(1, Reference.ZERO, (PauliGate(PauliString("X")),))
    half = Circuit(1, Reference.ZERO, (Rotation(PauliString("X"), np.pi / 4),))
    H = PenaltyHamiltonian(Z, ((flip, 3.0),))
    assert abs(H.expectation(half) - 1.5) < 1e-12
    sampled = [H.expectation(half, ShotConfig(ShotMode.SAMPLED, 10000, seed)) for seed in range(5)]
    assert all(abs(v - 1.5) < 0.1 for v in sampled)
    assert len(set(sampled)) > 1


def test_deflation_shifts_found_states_by_their_weights():
    H0 = PauliSum({"ZI": 1.0, "IZ": 0.5}, 2)
    flips = ["II", "XI", "IX", "XX"]
    circuits = [
        Circuit(2, Reference.ZERO, () if s == "II" else (PauliGate(PauliString(s)),)) for s in flips
    ]
    diagonal = np.real(np.diag(H0.dense()))
    for found, betas in (([0], [2.0]), ([0, 3], [2.0, 5.0]), ([1, 2, 3], [1.0, 4.0, 7.0])):
        penalty = PenaltyHamiltonian(H0, tuple((circuits[i], b) for i, b in zip(found, betas)))
        shifted = diagonal.copy()
        for i, beta in zip(found, betas):
            shifted[np.argmax(np.abs(circuits[i].prepare().amplitudes))] += beta
        assert_allclose(np.linalg.eigvalsh(penalty.dense()), np.sort(shifted), atol=1e-12)

def test_penalty_weights_must_be_positive():
    with pytest.raises(ConfigError):
        PenaltyHamiltonian(Z, ((Circuit(1), 0.0),))


def test_vqd_single_qubit_two_states():
    eigen = vqd_find(Z, 2, eigen_cfg=FAST_EIGEN, template=X_TEMPLATE, reference_energies=[-1.0, 1.0], seed=3)
    assert eigen.provenance == Provenance.VQD
    assert_allclose(eigen.energies, [-1.0, 1.0], atol=1e-4)
    assert eigen.max_offdiagonal_overlap() < 1e-3
    assert len(eigen.ansatze) == 2
    assert eigen.diagnostics["attempts"] == [1, 1]
    assert len(eigen.diagnostics["monotonic"]) == 2


def test_vqd_reports_stalled_state():
    with pytest.raises(ConvergenceError) as excinfo:
        vqd_find(Z, 1, eigen_cfg=FAST_EIGEN, template=X_TEMPLATE, reference_energies=[-2.0], seed=3)
    assert excinfo.value.diagnostics["state"] == 0
    assert excinfo.value.diagnostics["attempts"] == 1


def test_vqd_records_iteration_cap_without_tolerance():
    eigen = vqd_find(Z, 1, eigen_cfg=EigenConfig(step=0.1, max_iterations=2, restarts=0), template=X_TEMPLATE, seed=3)
    assert eigen.diagnostics["converged"] == [False]
    assert any("iteration cap" in w for w in eigen.diagnostics["warnings"])


def test_dense_eigensolve_reports_residual():
    eigen = dense_eigensolve(PauliSum({"ZI": 1.0, "XX": 0.3}, 2), 3)
    assert eigen.diagnostics["residual"] < 1e-12
    assert eigen.diagnostics["warnings"] == []


def test_vqd_needs_enough_betas():
    with pytest.raises(ConfigError):
        vqd_find(Z, 3, betas=[1.0], eigen_cfg=FAST_EIGEN, template=X_TEMPLATE)


@pytest.mark.slow
def test_vqd_double_well_matches_dense_oracle():
    model = build_model(ModelConfig())
    oracle = dense_eigensolve(model.hamiltonian, 2)
    eigen = vqd_find(
        encode_operator(model.hamiltonian),
        2,
        eigen_cfg=EigenConfig(step=10.0, max_iterations=1000, restarts=3, tolerance=1e-4),
        reference_energies=oracle.energies,
        seed=1234,
    )
    assert_allclose(eigen.energies, oracle.energies, atol=1e-4)
    fidelities = np.abs(np.sum(eigen.states.conj() * oracle.states, axis=1)) ** 2
    assert np.all(fidelities >= 0.99)
    assert eigen.diagnostics["monotonic"][0]


@pytest.mark.slow
def test_vqd_helium_six_states_stay_inside_the_spectrum():
    model = build_model(ModelConfig(kind=ModelKind.HELIUM))
    H0 = encode_operator(model.hamiltonian)
    spectrum = np.linalg.eigvalsh(model.hamiltonian.dense())
    eigen = vqd_find(H0, 6, eigen_cfg=EigenConfig(step=0.05, max_iterations=300, restarts=0), seed=1234)
    assert eigen.count == 6
    assert np.all(eigen.energies >= spectrum[0] - 1e-8)
    assert np.all(eigen.energies <= spectrum[-1] + 1e-8)
    assert len(eigen.diagnostics["iterations"]) == 6
    assert len(eigen.diagnostics["betas"]) == 5
    assert np.all(np.abs(np.linalg.norm(eigen.states, axis=1) - 1.0) < 1e-10)
