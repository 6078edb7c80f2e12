import logging
from typing import Tuple

import numpy as np

from vqdyn.constants import DENSE_CAP
from vqdyn.dvr import GridOperator, OperatorKind
from vqdyn.errors import DenseCapError, EncodingError
from vqdyn.pauli.algebra import PauliString, PauliSum, popcount

logger = logging.getLogger(__name__)

_MINUS_I_POWERS = np.array([1, -1j, -1, 1j])

# |a><b| on one qubit, keyed by (a, b)
_PROJECTORS = {
    (0, 0): (("I", 0.5), ("Z", 0.5)),
    (1, 1): (("I", 0.5), ("Z", -0.5)),
    (0, 1): (("X", 0.5), ("Y", 0.5j)),
    (1, 0): (("X", 0.5), ("Y", -0.5j)),
}


def _qubit_count(length: int) -> int:
    if length < 2 or length & (length - 1):
        raise EncodingError(f"Length {length} is not a power of two >= 2")
    return length.bit_length() - 1


def encode_index(m: int, n_qubits: int) -> Tuple[int, ...]:
    """Bits (k_1, ..., k_N) of m with qubit 1 as the least significant bit."""
    if not 0 <= m < 1 << n_qubits:
        raise EncodingError(f"Grid index {m} out of range for {n_qubits} qubits")
    return tuple((m >> q) & 1 for q in range(n_qubits))


def encode_projector(m: int, n: int, n_qubits: int) -> PauliSum:
    """Tensor expansion of |x_m><x_n| into 2^N Pauli strings."""
    bits_m, bits_n = encode_index(m, n_qubits), encode_index(n, n_qubits)
    partial = [("", 1.0 + 0j)]
    for a, b in zip(bits_m, bits_n):
        partial = [(s + letter, c * w) for s, c in partial for letter, w in _PROJECTORS[(a, b)]]
    return PauliSum(partial, n_qubits)


def walsh_hadamard(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unnormalised fast Walsh-Hadamard transform along one axis (length 2^N)."""
    data = np.moveaxis(np.array(values, dtype=complex), axis, -1)
    length = data.shape[-1]
    _qubit_count(length)
    lead = data.shape[:-1]
    h = 1
    while h < length:
        blocks = data.reshape(lead + (length // (2 * h), 2, h))
        low, high = blocks[..., 0, :].copy(), blocks[..., 1, :].copy()
        blocks[..., 0, :] = low + high
        blocks[..., 1, :] = low - high
        data = blocks.reshape(lead + (length,))
        h *= 2
    return np.moveaxis(data, -1, axis)


def _z_letters(z_mask: int, n_qubits: int) -> str:
    return "".join("Z" if (z_mask >> q) & 1 else "I" for q in range(n_qubits))


def expand_diagonal(values: np.ndarray) -> PauliSum:
    """
    Pauli expansion over {I, Z}^N of diag(values).

    The coefficient of the string with Z on the bits of s is WHT(values)[s] / 2^N.
    """
    values = np.asarray(values)
    if values.ndim != 1:
        raise EncodingError(f"Diagonal must be one-dimensional, got shape {values.shape}")
    n_qubits = _qubit_count(values.size)
    coeffs = walsh_hadamard(values) / values.size
    return PauliSum(((_z_letters(s, n_qubits), c) for s, c in enumerate(coeffs)), n_qubits)


def decompose_dense(matrix: np.ndarray) -> PauliSum:
    """
    Pauli decomposition of an arbitrary 2^N x 2^N matrix.

    For each flip pattern x, b_x[m] = A[m ^ x, m]; the coefficient of the string (x, z) is
    WHT(b_x)[z] / 2^N * (-i)^{|x & z|}.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise EncodingError(f"Expected a square matrix, got shape {matrix.shape}")
    dim = matrix.shape[0]
    if dim > DENSE_CAP:
        raise DenseCapError(f"Matrix dimension {dim} exceeds dense cap {DENSE_CAP}")
    n_qubits = _qubit_count(dim)
    index = np.arange(dim)
    flips = index[:, None]
    b = matrix[index[None, :] ^ flips, index[None, :]]
    transformed = walsh_hadamard(b, axis=1) / dim
    overlap = popcount(flips & index[None, :]) % 4
    coeffs = transformed * _MINUS_I_POWERS[overlap]

    items = []
    for x, z in zip(*np.nonzero(np.abs(coeffs) >= 1e-14)):
        items.append((PauliString.from_masks(int(x), int(z), n_qubits).letters, coeffs[x, z]))
    return PauliSum(items, n_qubits)


def _encode_kinetic(op: GridOperator) -> PauliSum:
    block = op.payload
    local_qubits = op.grid.qubits_per_dim
    local = PauliSum.zero(local_qubits)
    rows, cols = np.nonzero(block)
    for m, n in zip(rows, cols):
        local = local + encode_projector(int(m), int(n), local_qubits) * block[m, n]
    return local.embed(op.dim * local_qubits, op.grid.n_qubits)


def encode_operator(op: GridOperator) -> PauliSum:
    """
    Qubit form of a grid operator under the binary encoding.

    Dimension a occupies the contiguous qubit block [a * log2(L), (a + 1) * log2(L)).
    """
    if op.size > DENSE_CAP:
        raise DenseCapError(f"Operator dimension {op.size} exceeds dense cap {DENSE_CAP}")
    if op.kind == OperatorKind.SUM:
        total = PauliSum.zero(op.grid.n_qubits)
        for term in op.terms:
            total = total + encode_operator(term)
        result = total
    elif op.kind == OperatorKind.DIAGONAL:
        result = expand_diagonal(op.payload)
    elif op.kind == OperatorKind.KINETIC_1D:
        result = _encode_kinetic(op)
    else:
        result = decompose_dense(op.payload)
    logger.debug(f"Encoded {op.kind.value} operator into {len(result)} Pauli terms")
    return result
