import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.linalg import toeplitz

from vqdyn.constants import DENSE_CAP
from vqdyn.dvr.grid import DVRGrid
from vqdyn.errors import DenseCapError, GridError, NonHermitianError

logger = logging.getLogger(__name__)

CoordinateFunction = Callable[..., np.ndarray]


class OperatorKind(str, Enum):
    KINETIC_1D = "kinetic-1d"
    DIAGONAL = "diagonal-potential"
    DENSE = "dense"
    SUM = "sum"


@dataclass(frozen=True, eq=False)
class GridOperator:
    """
    Hermitian operator on the DVR product basis.

    kinetic-1d stores the L x L block and the dimension it acts on, diagonal-potential
    stores the L**d diagonal, dense stores the full matrix and sum holds other operators.
    Instances are immutable; dense() respects DENSE_CAP, matvec() works at any size.
    """

    kind: OperatorKind
    grid: DVRGrid
    payload: Optional[np.ndarray] = None
    dim: Optional[int] = None
    terms: Tuple["GridOperator", ...] = ()

    def __post_init__(self):
        if self.kind == OperatorKind.SUM:
            return
        payload = np.asarray(self.payload)
        payload.setflags(write=False)
        object.__setattr__(self, "payload", payload)
        if self.kind == OperatorKind.DIAGONAL:
            if payload.shape != (self.grid.size,):
                raise GridError(f"Diagonal payload has shape {payload.shape}, expected ({self.grid.size},)")
            if np.iscomplexobj(payload) and np.any(np.abs(payload.imag) > 1e-12):
                raise NonHermitianError("Diagonal operator has complex entries")
            return
        if self.kind == OperatorKind.KINETIC_1D:
            self.grid.check_dim(self.dim)
            expected = (self.grid.points_per_dim,) * 2
        else:
            expected = (self.grid.size,) * 2
        if payload.shape != expected:
            raise GridError(f"{self.kind.value} payload has shape {payload.shape}, expected {expected}")
        if not np.allclose(payload, payload.conj().T, atol=1e-12, rtol=0.0):
            raise NonHermitianError(f"{self.kind.value} payload is not Hermitian")

    @property
    def size(self) -> int:
        return self.grid.size

    def __add__(self, other: "GridOperator") -> "GridOperator":
        if other.grid != self.grid:
            raise GridError("Cannot add operators defined on different grids")
        left = self.terms if self.kind == OperatorKind.SUM else (self,)
        right = other.terms if other.kind == OperatorKind.SUM else (other,)
        return GridOperator(OperatorKind.SUM, self.grid, terms=left + right)

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        """Apply the operator to a vector of shape (size,) or a block (size, k)."""
        vector = np.asarray(vector)
        if self.kind == OperatorKind.SUM:
            return sum(term.matvec(vector) for term in self.terms)
        if self.kind == OperatorKind.DIAGONAL:
            return self.payload.reshape((-1,) + (1,) * (vector.ndim - 1)) * vector
        if self.kind == OperatorKind.DENSE:
            return self.payload @ vector
        L = self.grid.points_per_dim
        inner = L**self.dim
        outer = L ** (self.grid.dims - self.dim - 1)
        block = vector.reshape(outer, L, inner, -1)
        result = np.einsum("ij,ajbk->aibk", self.payload, block)
        return result.reshape(vector.shape)

    def dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        """Full matrix in the flat product basis."""
        if self.size > cap:
            raise DenseCapError(f"Operator dimension {self.size} exceeds dense cap {cap}")
        if self.kind == OperatorKind.SUM:
            return sum(term.dense(cap) for term in self.terms)
        if self.kind == OperatorKind.DIAGONAL:
            return np.diag(self.payload)
        if self.kind == OperatorKind.DENSE:
            return np.array(self.payload)
        L = self.grid.points_per_dim
        outer = np.eye(L ** (self.grid.dims - self.dim - 1))
        inner = np.eye(L**self.dim)
        return np.kron(outer, np.kron(self.payload, inner))

    def diagonal(self) -> np.ndarray:
        if self.kind == OperatorKind.SUM:
            return sum(term.diagonal() for term in self.terms)
        if self.kind == OperatorKind.DIAGONAL:
            return np.array(self.payload)
        if self.kind == OperatorKind.DENSE:
            return np.diag(self.payload).copy()
        L = self.grid.points_per_dim
        reps = L ** (self.grid.dims - self.dim - 1)
        return np.tile(np.repeat(np.diag(self.payload), L**self.dim), reps)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        matrix = self.dense()
        return bool(np.allclose(matrix, matrix.conj().T, atol=tol, rtol=0.0))


def build_kinetic_1d(grid: DVRGrid, dim: int) -> GridOperator:
    """
    Colbert-Miller kinetic block for one dimension (hbar = 1).

    T_ii = pi^2 / (6 m dx^2), T_ii' = (-1)^(i-i') / (m dx^2 (i-i')^2) otherwise.
    """
    grid.check_dim(dim)
    m = grid.mass[dim]
    dx = grid.spacing[dim]
    offsets = np.arange(grid.points_per_dim, dtype=float)
    column = np.empty_like(offsets)
    column[0] = np.pi**2 / 6.0
    column[1:] = (-1.0) ** offsets[1:] / offsets[1:] ** 2
    column /= m * dx**2
    return GridOperator(OperatorKind.KINETIC_1D, grid, toeplitz(column), dim=dim)


def _diagonal_operator(grid: DVRGrid, values: np.ndarray) -> GridOperator:
    values = np.asarray(values, dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        index = grid.multi_index(int(bad[0]))
        coords = tuple(float(grid.coordinates(a)[i]) for a, i in enumerate(index))
        raise GridError(
            f"Potential is not finite at grid point {index} (x = {coords}): {values[bad[0]]}"
        )
    return GridOperator(OperatorKind.DIAGONAL, grid, values)


def build_potential(grid: DVRGrid, v: CoordinateFunction) -> GridOperator:
    """
    Diagonal potential operator V(x_i1, ..., x_id) on every grid point.

    `v` is called once with the d coordinate meshes and must broadcast over them.
    """
    mesh = grid.mesh()
    with np.errstate(all="ignore"):
        values = np.broadcast_to(np.asarray(v(*mesh), dtype=float), mesh[0].shape)
    return _diagonal_operator(grid, values.ravel(order="F"))


def load_tabulated_potential(path: Path, grid: DVRGrid) -> GridOperator:
    """
    Read a one-column potential table of length L**d.

    Rows follow row-major multi-index order (i_1 slowest, i_d fastest).
    """
    values = np.loadtxt(path, dtype=float, ndmin=1)
    if values.shape != (grid.size,):
        raise GridError(f"Tabulated potential {path} has {values.size} values, expected {grid.size}")
    table = values.reshape((grid.points_per_dim,) * grid.dims, order="C")
    logger.debug(f"Loaded tabulated potential with {values.size} entries from {path}")
    return _diagonal_operator(grid, table.ravel(order="F"))


def kinetic_operator(grid: DVRGrid) -> GridOperator:
    """Sum of the per-dimension kinetic blocks."""
    blocks = [build_kinetic_1d(grid, a) for a in range(grid.dims)]
    total = blocks[0]
    for block in blocks[1:]:
        total = total + block
    return total


def assemble_hamiltonian(grid: DVRGrid, v: CoordinateFunction) -> GridOperator:
    """H_0 = sum_a T_a + V; dense() above DENSE_CAP raises DenseCapError."""
    return kinetic_operator(grid) + build_potential(grid, v)


def hamiltonian_from_potential(potential: GridOperator) -> GridOperator:
    """H_0 for an already-tabulated diagonal potential."""
    return kinetic_operator(potential.grid) + potential


def kinetic_term_count(grid: DVRGrid) -> int:
    """Number of distinct kinetic matrix-element families, d * L**2."""
    return grid.dims * grid.points_per_dim**2
