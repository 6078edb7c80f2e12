import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from vqdyn.chem import ZeroField, build_model
from vqdyn.constants import FS_TO_AU
from vqdyn.dynamics import ExactRun, evolution_operator, exact_observables, project_populations, propagate_exact
from vqdyn.errors import PropagationError
from vqdyn.models import ModelConfig, PulseConfig
from vqdyn.spectral import dense_eigensolve


@pytest.fixture(scope="module")
def model():
    return build_model(ModelConfig())


@pytest.fixture(scope="module")
def eigen(model):
    return dense_eigensolve(model.hamiltonian, 8)


def test_evolution_operator_matches_expm():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = a + a.conj().T
    U = evolution_operator(h, 0.37)
    assert_allclose(U, expm(-1j * 0.37 * h), atol=1e-12)
    assert_allclose(U.conj().T @ U, np.eye(6), atol=1e-12)


def test_field_free_ground_state_is_stationary(model, eigen):
    field_free = build_model(ModelConfig(pulse=PulseConfig(enabled=False)))
    run = ExactRun.from_model(field_free, eigen.states[0], step_fs=0.1, duration_fs=20.0)
    trajectory = propagate_exact(run)
    assert trajectory.times.size == 201
    populations = project_populations(trajectory, eigen)
    assert_allclose(populations[:, 0], 1.0, atol=1e-10)
    phases = trajectory.states @ eigen.states[0].conj()
    assert_allclose(phases, np.exp(-1j * eigen.energies[0] * trajectory.times), atol=1e-9)


def test_driven_run_preserves_norm_and_strides(model, eigen):
    run = ExactRun.from_model(model, eigen.states[0], step_fs=0.1, duration_fs=30.0, stride=7)
    trajectory = propagate_exact(run)
    assert_allclose(np.linalg.norm(trajectory.states, axis=1), 1.0, atol=1e-9)
    assert trajectory.times[1] == pytest.approx(7 * 0.1 * FS_TO_AU)
    assert trajectory.times[-1] == pytest.approx(294 * 0.1 * FS_TO_AU)
    assert_allclose(np.diff(trajectory.times), 7 * 0.1 * FS_TO_AU)
    assert_allclose(project_populations(trajectory, eigen).sum(axis=1), 1.0, atol=1e-9)


def test_time_reversal_returns_initial_state(eigen):
    h0 = np.diag(eigen.energies)
    coupling = np.zeros_like(h0)
    initial = np.zeros(8, dtype=complex)
    initial[:2] = 1 / np.sqrt(2)
    forward = propagate_exact(ExactRun(h0, coupling, ZeroField(400.0), 0.2, initial))
    backward = propagate_exact(
        ExactRun(h0, coupling, ZeroField(400.0), 0.2, forward.states[-1], time_reversed=True)
    )
    assert backward.times[-1] < 0
    assert abs(np.vdot(initial, backward.states[-1])) ** 2 > 1 - 1e-9


def test_step_halving_converges(model, eigen):
    coarse = propagate_exact(ExactRun.from_model(model, eigen.states[0], 0.2, duration_fs=40.0, stride=1))
    fine = propagate_exact(ExactRun.from_model(model, eigen.states[0], 0.1, duration_fs=40.0, stride=2))
    assert_allclose(coarse.times, fine.times)
    assert abs(np.vdot(coarse.states[-1], fine.states[-1])) ** 2 > 1 - 1e-8


def test_non_positive_step_rejected(model, eigen):
    with pytest.raises(PropagationError):
        propagate_exact(ExactRun.from_model(model, eigen.states[0], step_fs=0.0))


def test_observables_use_dipole_sign(model, eigen):
    run = ExactRun.from_model(model, eigen.states[0], step_fs=0.1, duration_fs=1.0)
    obs = exact_observables(propagate_exact(run), eigen.truncated(2), model.dipole)
    x = model.grid.flat_coordinates(0)
    expected = np.sum(np.abs(eigen.states[0]) ** 2 * x)
    assert obs.dipole[0] == pytest.approx(model.dipole.dipole_sign * expected)
    assert obs.n_states == 2
    assert_allclose(obs.populations[0], [1.0, 0.0], atol=1e-12)


def test_population_projection_checks_dimension(model, eigen):
    trajectory = propagate_exact(ExactRun.from_model(model, eigen.states[0], step_fs=0.1, duration_fs=1.0))
    other = dense_eigensolve(np.diag([0.0, 1.0]), 1)
    with pytest.raises(ValueError):
        project_populations(trajectory, other)
