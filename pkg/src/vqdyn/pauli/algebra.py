"""
Pauli strings and weighted Pauli sums.

Letter strings are written qubit 1 first: "XZ" means X on qubit 1 (the least significant
bit of the basis index) and Z on qubit 2. A string P with x/z masks acts on a basis state as
P|m> = i^{|x&z|} (-1)^{popcount(z&m)} |m ^ x>.
"""

from dataclasses import dataclass
from functools import cached_property, reduce
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple, Union

import numpy as np

from vqdyn.constants import DENSE_CAP, PRUNE_THRESHOLD
from vqdyn.errors import DenseCapError, EncodingError, NonHermitianError

LETTERS = "IXYZ"

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def popcount(values):
    """Bit count of an int or an integer array."""
    if isinstance(values, (int, np.integer)):
        return bin(int(values)).count("1")
    values = np.asarray(values, dtype=np.int64)
    count = np.zeros_like(values)
    while np.any(values):
        count += values & 1
        values = values >> 1
    return count


@dataclass(frozen=True, order=True)
class PauliString:
    letters: str

    def __post_init__(self):
        if not self.letters or any(c not in LETTERS for c in self.letters):
            raise EncodingError(f"Invalid Pauli string '{self.letters}'")

    @classmethod
    def from_masks(cls, x_mask: int, z_mask: int, n_qubits: int) -> "PauliString":
        letters = []
        for q in range(n_qubits):
            x, z = (x_mask >> q) & 1, (z_mask >> q) & 1
            letters.append("IXZY"[x + 2 * z])
        return cls("".join(letters))

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls("I" * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @cached_property
    def x_mask(self) -> int:
        return sum(1 << q for q, c in enumerate(self.letters) if c in "XY")

    @cached_property
    def z_mask(self) -> int:
        return sum(1 << q for q, c in enumerate(self.letters) if c in "ZY")

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    def __str__(self) -> str:
        return self.letters

    def __mul__(self, other: "PauliString") -> Tuple[complex, "PauliString"]:
        """Product self * other as (phase, string) with phase in {+-1, +-i}."""
        if other.n_qubits != self.n_qubits:
            raise EncodingError("Pauli strings act on different qubit counts")
        x1, z1, x2, z2 = self.x_mask, self.z_mask, other.x_mask, other.z_mask
        x3, z3 = x1 ^ x2, z1 ^ z2
        exponent = popcount(x1 & z1) + popcount(x2 & z2) + 2 * popcount(z1 & x2) - popcount(x3 & z3)
        return 1j ** (exponent % 4), PauliString.from_masks(x3, z3, self.n_qubits)

    def phases(self) -> np.ndarray:
        """Diagonal factors i^{|x&z|} (-1)^{popcount(z&m)} indexed by the input state m."""
        m = np.arange(1 << self.n_qubits)
        signs = 1 - 2 * (popcount(m & self.z_mask) & 1)
        return (1j ** (popcount(self.x_mask & self.z_mask) % 4)) * signs

    @cached_property
    def _action(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.phases(), np.arange(1 << self.n_qubits) ^ self.x_mask

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """P applied to a vector (2^N,) or a block (2^N, k)."""
        amplitudes = np.asarray(amplitudes)
        if amplitudes.shape[0] != 1 << self.n_qubits:
            raise EncodingError(
                f"State of dimension {amplitudes.shape[0]} does not match {self.n_qubits} qubits"
            )
        phases, source = self._action
        weighted = phases.reshape((-1,) + (1,) * (amplitudes.ndim - 1)) * amplitudes
        return weighted[source]

    def dense(self) -> np.ndarray:
        # qubit N is the most significant factor, so Kronecker from the right end
        return reduce(np.kron, (_SINGLE[c] for c in reversed(self.letters)))


Coefficient = Union[complex, float, int]


def _merge(items: Iterable[Tuple[str, Coefficient]]) -> Dict[str, complex]:
    merged: Dict[str, complex] = {}
    for letters, coeff in items:
        merged[letters] = merged.get(letters, 0.0) + complex(coeff)
    return {k: v for k, v in merged.items() if abs(v) >= PRUNE_THRESHOLD}


class PauliSum:
    """
    Immutable weighted sum of Pauli strings on a fixed qubit count.

    Terms whose coefficient magnitude falls below PRUNE_THRESHOLD are dropped on
    construction, so the zero operator is the empty sum.
    """

    def __init__(self, terms: Union[Mapping[str, Coefficient], Iterable[Tuple[str, Coefficient]]], n_qubits: int):
        if n_qubits < 1:
            raise EncodingError(f"PauliSum needs at least one qubit, got {n_qubits}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged = _merge((str(k), v) for k, v in items)
        for letters in merged:
            if len(letters) != n_qubits:
                raise EncodingError(f"Pauli string '{letters}' does not have {n_qubits} letters")
            PauliString(letters)
        self._terms = MappingProxyType(dict(sorted(merged.items())))
        self._n_qubits = n_qubits

    @classmethod
    def zero(cls, n_qubits: int) -> "PauliSum":
        return cls({}, n_qubits)

    @classmethod
    def single(cls, letters: str, coeff: Coefficient = 1.0) -> "PauliSum":
        return cls({letters: coeff}, len(letters))

    @property
    def n_qubits(self) -> int:
        return self._n_qubits

    @property
    def terms(self) -> Mapping[str, complex]:
        return self._terms

    def strings(self) -> List[PauliString]:
        return [PauliString(k) for k in self._terms]

    def coefficient(self, letters: str) -> complex:
        return self._terms.get(letters, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[str, complex]]:
        return iter(self._terms.items())

    def __repr__(self) -> str:
        return f"PauliSum({len(self)} terms, {self.n_qubits} qubits)"

    def _check_compatible(self, other: "PauliSum") -> None:
        if other.n_qubits != self.n_qubits:
            raise EncodingError(f"Cannot combine {self.n_qubits}- and {other.n_qubits}-qubit sums")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_compatible(other)
        return PauliSum(list(self) + list(other), self.n_qubits)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + other * -1.0

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def __mul__(self, other: Union["PauliSum", Coefficient]) -> "PauliSum":
        if isinstance(other, PauliSum):
            self._check_compatible(other)
            products = []
            for a, ca in self:
                for b, cb in other:
                    phase, p = PauliString(a) * PauliString(b)
                    products.append((p.letters, phase * ca * cb))
            return PauliSum(products, self.n_qubits)
        return PauliSum(((k, v * other) for k, v in self), self.n_qubits)

    __rmul__ = __mul__

    def allclose(self, other: "PauliSum", atol: float = 1e-10) -> bool:
        if other.n_qubits != self.n_qubits:
            return False
        keys = set(self._terms) | set(other.terms)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= atol for k in keys)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def require_hermitian(self, tol: float = 1e-10) -> None:
        if not self.is_hermitian(tol):
            worst = max(self._terms.items(), key=lambda kv: abs(kv[1].imag))
            raise NonHermitianError(
                f"Operator is not Hermitian: coefficient of {worst[0]} is {worst[1]}"
            )

    def hermitian_part(self) -> "PauliSum":
        return PauliSum(((k, v.real) for k, v in self), self.n_qubits)

    def embed(self, offset: int, n_total: int) -> "PauliSum":
        """Place this sum on qubits [offset, offset + n_qubits) of an n_total register."""
        if offset < 0 or offset + self.n_qubits > n_total:
            raise EncodingError(f"Cannot embed {self.n_qubits} qubits at {offset} in {n_total}")
        before, after = "I" * offset, "I" * (n_total - offset - self.n_qubits)
        return PauliSum(((before + k + after, v) for k, v in self), n_total)

    @cached_property
    def _x_groups(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        dim = 1 << self.n_qubits
        groups: Dict[int, np.ndarray] = {}
        for letters, coeff in self:
            p = PauliString(letters)
            groups.setdefault(p.x_mask, np.zeros(dim, dtype=complex))
            groups[p.x_mask] += coeff * p.phases()
        index = np.arange(dim)
        return [(index ^ x, diag) for x, diag in groups.items()]

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Sum applied to a vector (2^N,) or a block (2^N, k) without densifying."""
        amplitudes = np.asarray(amplitudes)
        if amplitudes.shape[0] != 1 << self.n_qubits:
            raise EncodingError(
                f"State of dimension {amplitudes.shape[0]} does not match {self.n_qubits} qubits"
            )
        shape = (-1,) + (1,) * (amplitudes.ndim - 1)
        result = np.zeros(amplitudes.shape, dtype=complex)
        for source, diag in self._x_groups:
            result += (diag.reshape(shape) * amplitudes)[source]
        return result

    def dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        dim = 1 << self.n_qubits
        if dim > cap:
            raise DenseCapError(f"Operator dimension {dim} exceeds dense cap {cap}")
        return self.apply(np.eye(dim, dtype=complex))

    def diagonal(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        for source, diag in self._x_groups:
            if source[0] == 0:
                return diag.copy()
        return np.zeros(dim, dtype=complex)

    def to_text(self) -> str:
        """One term per line: 'coeff_re coeff_im LETTERS'."""
        return "\n".join(f"{c.real!r} {c.imag!r} {k}" for k, c in self)

    @classmethod
    def from_text(cls, text: str, n_qubits: int = None) -> "PauliSum":
        items = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise EncodingError(f"Line {lineno}: expected 'coeff_re coeff_im LETTERS', got '{line}'")
            try:
                coeff = complex(float(parts[0]), float(parts[1]))
            except ValueError as e:
                raise EncodingError(f"Line {lineno}: bad coefficient ({e})") from e
            items.append((parts[2], coeff))
        if n_qubits is None:
            if not items:
                raise EncodingError("Cannot infer qubit count from an empty Pauli sum")
            n_qubits = len(items[0][0])
        return cls(items, n_qubits)
