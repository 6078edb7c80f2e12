import numpy as np
import pytest
from numpy.testing import assert_allclose

from vqdyn.dvr import (
    DVRGrid,
    GridOperator,
    OperatorKind,
    assemble_hamiltonian,
    build_kinetic_1d,
    build_potential,
    kinetic_operator,
    kinetic_term_count,
    load_tabulated_potential,
)
from vqdyn.errors import DenseCapError, GridError, NonHermitianError


def unit_grid(points: int, dims: int = 1) -> DVRGrid:
    """Grid with unit spacing and unit mass."""
    return DVRGrid(dims, points, 0.0, float(points - 1), 1.0)


def test_kinetic_entries_unit_spacing():
    """Diagonal, first and second offset of the kinetic block for m = dx = 1."""
    T = build_kinetic_1d(unit_grid(8), 0).dense()
    assert abs(T[0, 0] - np.pi**2 / 6) < 1e-12
    assert abs(T[0, 1] - (-1.0)) < 1e-12
    assert abs(T[0, 2] - 0.25) < 1e-12
    assert abs(T[3, 5] - 0.25) < 1e-12


@pytest.mark.parametrize("points", [2, 4, 8, 16])
def test_kinetic_hermitian_and_toeplitz(points):
    T = build_kinetic_1d(unit_grid(points), 0).dense()
    assert_allclose(T, T.T, atol=1e-14)
    for k in range(points):
        band = np.diagonal(T, offset=k)
        assert_allclose(band, band[0], atol=1e-14)


def test_kinetic_scales_with_mass_and_spacing():
    base = build_kinetic_1d(DVRGrid(1, 4, 0.0, 3.0, 1.0), 0).dense()
    heavy = build_kinetic_1d(DVRGrid(1, 4, 0.0, 6.0, 2.0), 0).dense()
    assert_allclose(heavy, base / 8.0, atol=1e-14)


def test_grid_rejects_bad_definitions():
    with pytest.raises(GridError):
        DVRGrid(1, 6, 0.0, 1.0, 1.0)
    with pytest.raises(GridError):
        DVRGrid(1, 1, 0.0, 1.0, 1.0)
    with pytest.raises(GridError):
        DVRGrid(1, 4, 1.0, 1.0, 1.0)
    with pytest.raises(GridError):
        DVRGrid(1, 4, 0.0, 1.0, -1.0)
    with pytest.raises(GridError):
        DVRGrid(2, 4, (0.0, 0.0, 0.0), 1.0, 1.0)


def test_grid_endpoints_included():
    grid = DVRGrid.from_angstrom(1, 8, -0.8, 0.8, 1.0)
    x = grid.coordinates(0)
    assert x.size == 8
    assert_allclose([x[0], x[-1]], [-0.8 * 1.8897261254578281, 0.8 * 1.8897261254578281])
    assert grid.n_qubits == 3


def test_flat_index_dimension_one_fastest():
    grid = unit_grid(4, dims=2)
    assert grid.multi_index(1) == (1, 0)
    assert grid.multi_index(4) == (0, 1)
    assert_allclose(grid.flat_coordinates(0)[:4], [0, 1, 2, 3])
    assert_allclose(grid.flat_coordinates(1)[:4], [0, 0, 0, 0])


def test_potential_harmonic_values():
    grid = unit_grid(4)
    V = build_potential(grid, lambda x: 0.5 * x**2)
    assert V.kind == OperatorKind.DIAGONAL
    assert_allclose(V.diagonal(), 0.5 * np.arange(4.0) ** 2)


def test_potential_non_finite_names_point():
    grid = unit_grid(4)
    with pytest.raises(GridError, match=r"\(0,\)"):
        build_potential(grid, lambda x: 1.0 / x)


def test_constant_potential_shifts_spectrum():
    grid = unit_grid(8)
    T = kinetic_operator(grid).dense()
    H = assemble_hamiltonian(grid, lambda x: 0.3 + 0.0 * x).dense()
    assert_allclose(np.linalg.eigvalsh(H), np.linalg.eigvalsh(T) + 0.3, atol=1e-12)


def test_two_dimensional_kinetic_is_kronecker_sum():
    grid = unit_grid(4, dims=2)
    T1 = build_kinetic_1d(unit_grid(4), 0).dense()
    expected = np.kron(np.eye(4), T1) + np.kron(T1, np.eye(4))
    assert_allclose(kinetic_operator(grid).dense(), expected, atol=1e-14)


def test_matvec_matches_dense():
    grid = unit_grid(4, dims=2)
    H = assemble_hamiltonian(grid, lambda x, y: np.cos(x) * np.sin(y))
    rng = np.random.default_rng(3)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    assert_allclose(H.matvec(v), H.dense() @ v, atol=1e-12)
    block = rng.normal(size=(16, 3))
    assert_allclose(H.matvec(block), H.dense() @ block, atol=1e-12)
    assert_allclose(H.diagonal(), np.diag(H.dense()), atol=1e-14)


def test_dense_cap_enforced():
    grid = unit_grid(8, dims=2)
    H = assemble_hamiltonian(grid, lambda x, y: x * y)
    with pytest.raises(DenseCapError):
        H.dense(cap=32)


def test_non_hermitian_payload_rejected():
    grid = unit_grid(2)
    with pytest.raises(NonHermitianError):
        GridOperator(OperatorKind.DENSE, grid, np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_operators_on_different_grids_do_not_add():
    a = build_kinetic_1d(unit_grid(4), 0)
    b = build_kinetic_1d(unit_grid(8), 0)
    with pytest.raises(GridError):
        a + b


def test_tabulated_potential_row_major(tmp_path):
    grid = unit_grid(2, dims=2)
    # rows: (i1, i2) = (0,0), (0,1), (1,0), (1,1)
    path = tmp_path / "potential.txt"
    path.write_text("0.0\n1.0\n2.0\n3.0\n")
    V = load_tabulated_potential(path, grid)
    # flat index i1 + 2*i2
    assert_allclose(V.diagonal(), [0.0, 2.0, 1.0, 3.0])


def test_tabulated_potential_length_checked(tmp_path):
    path = tmp_path / "short.txt"
    path.write_text("0.0\n1.0\n")
    with pytest.raises(GridError):
        load_tabulated_potential(path, unit_grid(4))


def test_kinetic_term_count():
    assert kinetic_term_count(unit_grid(8)) == 64
    assert kinetic_term_count(unit_grid(8, dims=2)) == 128
