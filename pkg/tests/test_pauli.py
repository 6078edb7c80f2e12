import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from vqdyn.chem import build_model
from vqdyn.dvr import DVRGrid, assemble_hamiltonian
from vqdyn.errors import DenseCapError, EncodingError, NonHermitianError
from vqdyn.models import ModelConfig, ModelKind
from vqdyn.pauli import (
    PauliString,
    PauliSum,
    decompose_dense,
    encode_index,
    encode_operator,
    encode_projector,
    expand_diagonal,
    walsh_hadamard,
)

pauli_strings = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.text(alphabet="IXYZ", min_size=n, max_size=n)
)
pauli_pairs = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.tuples(
        st.text(alphabet="IXYZ", min_size=n, max_size=n), st.text(alphabet="IXYZ", min_size=n, max_size=n)
    )
)


def test_single_qubit_action():
    zero, one = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    assert_allclose(PauliString("X").apply(zero), one)
    assert_allclose(PauliString("Y").apply(zero), 1j * one)
    assert_allclose(PauliString("Y").apply(one), -1j * zero)
    assert_allclose(PauliString("Z").apply(one), -one)


def test_qubit_one_is_least_significant():
    # X on qubit 1 flips bit 0: |0> -> |1>
    state = np.zeros(4, dtype=complex)
    state[0] = 1.0
    assert_allclose(PauliString("XI").apply(state), np.eye(4)[1])
    assert_allclose(PauliString("IX").apply(state), np.eye(4)[2])
    assert_allclose(PauliString("ZX").dense(), np.kron([[0, 1], [1, 0]], np.diag([1, -1])))


@given(pauli_strings)
def test_apply_matches_dense(letters):
    p = PauliString(letters)
    rng = np.random.default_rng(len(letters))
    v = rng.normal(size=2**p.n_qubits) + 1j * rng.normal(size=2**p.n_qubits)
    assert_allclose(p.apply(v), p.dense() @ v, atol=1e-12)


@given(pauli_pairs)
def test_product_phase_matches_matrices(pair):
    a, b = PauliString(pair[0]), PauliString(pair[1])
    phase, c = a * b
    assert_allclose(a.dense() @ b.dense(), phase * c.dense(), atol=1e-12)


@given(pauli_strings)
def test_masks_round_trip(letters):
    p = PauliString(letters)
    assert PauliString.from_masks(p.x_mask, p.z_mask, p.n_qubits) == p


def test_invalid_strings_rejected():
    with pytest.raises(EncodingError):
        PauliString("XA")
    with pytest.raises(EncodingError):
        PauliString("")
    with pytest.raises(EncodingError):
        PauliSum({"XX": 1.0}, 3)


def test_sum_merges_and_prunes():
    s = PauliSum([("XI", 1.0), ("XI", -1.0 + 1e-14), ("ZZ", 0.5)], 2)
    assert list(s.terms) == ["ZZ"]
    assert len(PauliSum.zero(2)) == 0


def test_sum_algebra_against_dense():
    a = PauliSum({"XZ": 0.3, "YY": -0.2, "II": 1.0}, 2)
    b = PauliSum({"ZI": 0.7, "XY": 0.1j}, 2)
    assert_allclose((a + b).dense(), a.dense() + b.dense(), atol=1e-12)
    assert_allclose((a - b).dense(), a.dense() - b.dense(), atol=1e-12)
    assert_allclose((a * b).dense(), a.dense() @ b.dense(), atol=1e-12)
    assert_allclose((2.5 * a).dense(), 2.5 * a.dense(), atol=1e-12)


def test_hermiticity_checks():
    assert PauliSum({"XZ": 0.3, "YI": -1.0}, 2).is_hermitian()
    bad = PauliSum({"XZ": 0.3j}, 2)
    with pytest.raises(NonHermitianError):
        bad.require_hermitian()
    assert bad.hermitian_part().allclose(PauliSum.zero(2))


def test_text_round_trip():
    s = PauliSum({"XZ": 0.25, "YY": -1.5 + 0.5j}, 2)
    assert PauliSum.from_text(s.to_text()).allclose(s, atol=0.0)
    with pytest.raises(EncodingError):
        PauliSum.from_text("0.1 XZ")


def test_embed_places_block():
    s = PauliSum({"XZ": 1.0}, 2).embed(1, 4)
    assert list(s.terms) == ["IXZI"]
    with pytest.raises(EncodingError):
        PauliSum({"XZ": 1.0}, 2).embed(3, 4)


def test_encode_index_bits():
    assert encode_index(6, 3) == (0, 1, 1)
    with pytest.raises(EncodingError):
        encode_index(8, 3)


@pytest.mark.parametrize("m,n", [(0, 0), (1, 2), (5, 3), (7, 7)])
def test_projector_dense(m, n):
    expected = np.zeros((8, 8))
    expected[m, n] = 1.0
    P = encode_projector(m, n, 3)
    assert len(P) == 8
    assert_allclose(P.dense(), expected, atol=1e-14)


def test_walsh_hadamard_matches_matrix():
    H2 = np.array([[1, 1], [1, -1]])
    H8 = np.kron(np.kron(H2, H2), H2)
    values = np.arange(8.0) ** 2
    assert_allclose(walsh_hadamard(values), H8 @ values, atol=1e-12)


@given(st.lists(st.floats(min_value=-10, max_value=10), min_size=8, max_size=8))
@settings(max_examples=50)
def test_expand_diagonal_round_trip(values):
    s = expand_diagonal(np.array(values))
    assert len(s) <= 8
    assert all(set(k) <= {"I", "Z"} for k in s.terms)
    assert_allclose(np.diag(s.dense()).real, values, atol=1e-10)


def test_expand_diagonal_term_count_by_enumeration():
    rng = np.random.default_rng(0)
    for n in range(1, 6):
        s = expand_diagonal(rng.normal(size=2**n))
        assert len(s) <= 2**n
    assert len(expand_diagonal(np.full(8, 2.0))) == 1


def test_decompose_dense_random_matrix():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    assert_allclose(decompose_dense(A).dense(), A, atol=1e-12)


def test_decompose_dense_rejects_bad_shapes():
    with pytest.raises(EncodingError):
        decompose_dense(np.eye(6))
    with pytest.raises(EncodingError):
        decompose_dense(np.ones((2, 4)))


def test_double_well_hamiltonian_round_trip():
    model = build_model(ModelConfig(kind=ModelKind.DOUBLE_WELL))
    H = encode_operator(model.hamiltonian)
    assert H.n_qubits == 3
    assert H.is_hermitian()
    assert_allclose(H.dense(), model.hamiltonian.dense(), atol=1e-10)


def test_helium_hamiltonian_round_trip():
    model = build_model(ModelConfig(kind=ModelKind.HELIUM))
    H = encode_operator(model.hamiltonian)
    assert H.n_qubits == 6
    assert_allclose(H.dense(), model.hamiltonian.dense(), atol=1e-10)


def test_sum_apply_matches_dense():
    grid = DVRGrid(2, 4, -1.0, 1.0, 1.0)
    H = encode_operator(assemble_hamiltonian(grid, lambda x, y: x**2 + x * y))
    rng = np.random.default_rng(5)
    block = rng.normal(size=(16, 2)) + 1j * rng.normal(size=(16, 2))
    assert_allclose(H.apply(block), H.dense() @ block, atol=1e-12)
    assert_allclose(H.diagonal(), np.diag(H.dense()), atol=1e-12)


def test_encode_respects_dense_cap():
    grid = DVRGrid(2, 128, -1.0, 1.0, 1.0)
    with pytest.raises(DenseCapError):
        encode_operator(assemble_hamiltonian(grid, lambda x, y: x * y))
