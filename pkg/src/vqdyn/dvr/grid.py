from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from vqdyn.constants import ANGSTROM_TO_BOHR
from vqdyn.errors import GridError

PerDim = Union[float, Sequence[float]]


def _per_dim(value: PerDim, dims: int, name: str) -> Tuple[float, ...]:
    if np.isscalar(value):
        return tuple(float(value) for _ in range(dims))
    values = tuple(float(v) for v in value)
    if len(values) != dims:
        raise GridError(f"{name} has {len(values)} entries, expected {dims}")
    return values


@dataclass(frozen=True)
class DVRGrid:
    """
    Uniform Cartesian grid, identical point count in every dimension.

    Both interval endpoints are grid points, so spacing = (xmax - xmin) / (L - 1).
    Multi-index (i_1, ..., i_d) maps to the flat index sum_a i_a * L**(a-1): dimension 1
    varies fastest, which puts it on the lowest qubit block after binary encoding.
    Lengths are in bohr, masses in electron masses.
    """

    dims: int
    points_per_dim: int
    xmin: Tuple[float, ...]
    xmax: Tuple[float, ...]
    mass: Tuple[float, ...]

    def __post_init__(self):
        if self.dims < 1:
            raise GridError(f"Grid needs at least one dimension, got {self.dims}")
        L = self.points_per_dim
        if L < 2 or (L & (L - 1)) != 0:
            raise GridError(f"points_per_dim must be a power of two >= 2, got {L}")
        object.__setattr__(self, "xmin", _per_dim(self.xmin, self.dims, "xmin"))
        object.__setattr__(self, "xmax", _per_dim(self.xmax, self.dims, "xmax"))
        object.__setattr__(self, "mass", _per_dim(self.mass, self.dims, "mass"))
        for lo, hi in zip(self.xmin, self.xmax):
            if not hi > lo:
                raise GridError(f"Grid extent must satisfy xmax > xmin, got [{lo}, {hi}]")
        if any(m <= 0 for m in self.mass):
            raise GridError(f"Masses must be positive, got {self.mass}")

    @classmethod
    def from_angstrom(
        cls, dims: int, points_per_dim: int, xmin: PerDim, xmax: PerDim, mass: PerDim
    ) -> "DVRGrid":
        """Build a grid whose extents are given in angstrom."""
        lo = np.asarray(_per_dim(xmin, dims, "xmin")) * ANGSTROM_TO_BOHR
        hi = np.asarray(_per_dim(xmax, dims, "xmax")) * ANGSTROM_TO_BOHR
        return cls(dims, points_per_dim, tuple(lo), tuple(hi), mass)

    @property
    def size(self) -> int:
        return self.points_per_dim**self.dims

    @property
    def qubits_per_dim(self) -> int:
        return int(self.points_per_dim).bit_length() - 1

    @property
    def n_qubits(self) -> int:
        return self.dims * self.qubits_per_dim

    @property
    def spacing(self) -> Tuple[float, ...]:
        L = self.points_per_dim
        return tuple((hi - lo) / (L - 1) for lo, hi in zip(self.xmin, self.xmax))

    def check_dim(self, dim: int) -> None:
        if not 0 <= dim < self.dims:
            raise GridError(f"Dimension index {dim} outside [0, {self.dims})")

    def coordinates(self, dim: int) -> np.ndarray:
        """Grid coordinates x_i = xmin + i * dx along one dimension."""
        self.check_dim(dim)
        return self.xmin[dim] + self.spacing[dim] * np.arange(self.points_per_dim)

    def mesh(self) -> List[np.ndarray]:
        """Coordinate arrays of shape (L,)*d, indexed [i_1, ..., i_d]."""
        axes = [self.coordinates(a) for a in range(self.dims)]
        return np.meshgrid(*axes, indexing="ij")

    def flat_coordinates(self, dim: int) -> np.ndarray:
        """Coordinate of every flat grid index along one dimension."""
        return self.mesh()[dim].ravel(order="F")

    def multi_index(self, flat: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(flat, (self.points_per_dim,) * self.dims, order="F"))
