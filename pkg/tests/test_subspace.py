import numpy as np
import pytest
from numpy.testing import assert_allclose

from vqdyn.chem import ZeroField, build_model
from vqdyn.constants import FS_TO_AU
from vqdyn.analysis import hhg_spectrum
from vqdyn.dynamics import (
    ExactRun,
    exact_observables,
    SubspaceModel,
    observables,
    output_times,
    project_hamiltonian,
    propagate_exact,
    propagate_subspace,
)
from vqdyn.errors import StepSizeError
from vqdyn.models import DipoleRoute, ModelConfig, ModelKind
from vqdyn.spectral import EigenSet, dense_eigensolve


@pytest.fixture(scope="module")
def model():
    return build_model(ModelConfig())


@pytest.fixture(scope="module")
def eigen(model):
    return dense_eigensolve(model.hamiltonian, 8)


def test_dipole_routes_agree(model, eigen):
    direct = project_hamiltonian(eigen.truncated(4), model.dipole, model.pulse, DipoleRoute.DIRECT)
    kicked = project_hamiltonian(eigen.truncated(4), model.dipole, model.pulse, DipoleRoute.PHASE_KICK)
    assert_allclose(kicked.dipole_sub, direct.dipole_sub, atol=1e-7)
    x = model.grid.flat_coordinates(0)
    expected = eigen.states[:4].conj() @ (x[:, None] * eigen.states[:4].T)
    assert_allclose(direct.dipole_sub, expected, atol=1e-10)


def test_field_free_populations_are_constant(model, eigen):
    sub = project_hamiltonian(
        eigen.truncated(2), model.dipole, ZeroField(1e4), initial=np.array([0.6, 0.8j])
    )
    trajectory = propagate_subspace(sub, output_times(1e4, 50.0))
    obs = observables(sub, trajectory)
    assert_allclose(obs.populations[:, 0], 0.36, atol=1e-10)
    assert_allclose(obs.populations[:, 1], 0.64, atol=1e-10)
    phase = trajectory.coeffs[-1, 0] / 0.6
    assert phase == pytest.approx(np.exp(-1j * eigen.energies[0] * 1e4), abs=1e-8)


def test_field_free_subspace_conserves_energy(model, eigen):
    sub = project_hamiltonian(
        eigen.truncated(3), model.dipole, ZeroField(2e4), initial=np.array([0.6, 0.48j, -0.64])
    )
    obs = observables(sub, propagate_subspace(sub, output_times(2e4, 40.0)))
    energy = obs.populations @ eigen.energies[:3]
    assert_allclose(energy, energy[0], rtol=0, atol=1e-12)


def test_populations_do_not_depend_on_eigenvector_phases(model, eigen):
    reference = eigen.truncated(3)
    phases = np.exp(1j * np.random.default_rng(7).uniform(0, 2 * np.pi, 3))
    rotated = EigenSet(reference.energies, reference.states * phases[:, None], reference.provenance)
    t_grid = output_times(100.0 * FS_TO_AU, 0.01 * FS_TO_AU, stride=100)
    initial = np.array([0.8, 0.6, 0.0])
    populations = [
        observables(sub, propagate_subspace(sub, t_grid)).populations
        for sub in (
            project_hamiltonian(reference, model.dipole, model.pulse, initial=initial),
            project_hamiltonian(rotated, model.dipole, model.pulse, initial=initial * phases.conj()),
        )
    ]
    assert_allclose(populations[1], populations[0], atol=1e-9)


def test_driven_norm_is_preserved(model, eigen):
    sub = project_hamiltonian(eigen.truncated(2), model.dipole, model.pulse)
    t_grid = output_times(200.0 * FS_TO_AU, 0.01 * FS_TO_AU, stride=100)
    trajectory = propagate_subspace(sub, t_grid)
    assert_allclose(np.linalg.norm(trajectory.coeffs, axis=1), 1.0, atol=1e-9)
    obs = observables(sub, trajectory)
    assert obs.dipole.shape == t_grid.shape
    assert_allclose(obs.times_fs[-1], 200.0)


def test_full_subspace_matches_exact_propagation(model, eigen):
    duration, step_fs = 50.0, 0.1
    exact = propagate_exact(ExactRun.from_model(model, eigen.states[0], step_fs, duration_fs=duration, stride=10))
    sub = project_hamiltonian(eigen, model.dipole, model.pulse)
    trajectory = propagate_subspace(sub, output_times(duration * FS_TO_AU, step_fs * FS_TO_AU, stride=10))
    assert_allclose(trajectory.times, exact.times)
    full = trajectory.coeffs @ eigen.states
    fidelity = np.abs(np.sum(full.conj() * exact.states, axis=1)) ** 2
    assert np.all(fidelity > 1 - 1e-6)


def test_too_coarse_substeps_raise():
    sub = SubspaceModel(np.zeros(2), np.array([[0.0, 1.0], [1.0, 0.0]]), lambda t: 50.0)
    with pytest.raises(StepSizeError):
        propagate_subspace(sub, np.array([0.0, 1.0]), peak_field=0.0)


def test_subspace_model_validation():
    with pytest.raises(ValueError):
        SubspaceModel(np.zeros(2), np.array([[0.0, 1.0], [0.0, 0.0]]), lambda t: 0.0)
    with pytest.raises(ValueError):
        SubspaceModel(np.zeros(2), np.zeros((2, 2)), lambda t: 0.0, coeffs=np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        propagate_subspace(SubspaceModel(np.zeros(2), np.zeros((2, 2)), lambda t: 0.0), np.array([1.0, 0.0]))


@pytest.mark.slow
def test_helium_six_state_subspace_tracks_exact():
    model = build_model(ModelConfig(kind=ModelKind.HELIUM))
    eigen = dense_eigensolve(model.hamiltonian, 64)
    duration, step_fs = 5.0, 0.01
    exact = propagate_exact(ExactRun.from_model(model, eigen.states[0], step_fs, duration_fs=duration, stride=50))
    sub = project_hamiltonian(eigen.truncated(6), model.dipole, model.pulse)
    trajectory = propagate_subspace(sub, output_times(duration * FS_TO_AU, step_fs * FS_TO_AU, stride=50))
    exact_ground = np.abs(exact.states @ eigen.states[0].conj()) ** 2
    assert_allclose(np.abs(trajectory.coeffs[:, 0]) ** 2, exact_ground, atol=1e-3)


@pytest.mark.slow
def test_two_state_double_well_follows_exact_populations(model, eigen):
    exact = propagate_exact(ExactRun.from_model(model, eigen.states[0], 0.1, stride=100))
    exact_populations = np.abs(exact.states @ eigen.states[:2].conj().T) ** 2
    sub = project_hamiltonian(eigen.truncated(2), model.dipole, model.pulse)
    trajectory = propagate_subspace(sub, exact.times)
    populations = observables(sub, trajectory).populations
    assert np.max(np.abs(populations - exact_populations)) <= 0.05
    assert np.max(populations[:, 1]) >= 0.5
    assert np.max(exact_populations[:, 1]) >= 0.5


@pytest.mark.slow
def test_helium_six_state_dipole_over_the_full_pulse():
    model = build_model(ModelConfig(kind=ModelKind.HELIUM))
    eigen = dense_eigensolve(model.hamiltonian, 6)
    step_fs = 0.58
    exact = propagate_exact(ExactRun.from_model(model, eigen.states[0], step_fs))
    sub = project_hamiltonian(eigen, model.dipole, model.pulse)
    trajectory = propagate_subspace(sub, exact.times)
    d_sub = observables(sub, trajectory).dipole
    d_exact = exact_observables(exact, eigen, model.dipole).dipole
    assert exact.times[-1] == pytest.approx(model.pulse.duration, abs=step_fs * FS_TO_AU)
    assert abs(d_exact[0]) < 1e-10
    assert abs(d_sub[0]) < 1e-10
    assert np.linalg.norm(d_sub - d_exact) <= 0.05 * np.linalg.norm(d_exact)

    carrier = model.pulse.omega
    spectra = [hhg_spectrum(exact.times, d, carrier) for d in (d_exact, d_sub)]
    max_order = min(30.0, spectra[0].orders[-1])
    bin_width = spectra[0].resolution / carrier
    exact_peaks, sub_peaks = (s.peak_orders(max_order) for s in spectra)
    assert exact_peaks.size > 0
    for order in exact_peaks:
        assert np.min(np.abs(sub_peaks - order)) <= bin_width + 1e-9
