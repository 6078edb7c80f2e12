import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from vqdyn.ansatz import Ansatz
from vqdyn.errors import ConfigError
from vqdyn.util.io import load_json, save_json

logger = logging.getLogger(__name__)


class Provenance(str, Enum):
    DENSE = "dense-oracle"
    VQD = "vqd"


def fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real and positive."""
    vector = np.asarray(vector, dtype=complex)
    pivot = vector[np.argmax(np.abs(vector))]
    return vector * (abs(pivot) / pivot) if pivot != 0 else vector


@dataclass
class EigenSet:
    """
    Lowest eigenpairs, ascending in energy. States are kept as dense vectors in every case;
    variationally found states also keep the ansatz that prepares them.
    """

    energies: np.ndarray
    states: np.ndarray
    provenance: Provenance
    ansatze: Optional[List[Ansatz]] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.energies = np.asarray(self.energies, dtype=float)
        self.states = np.atleast_2d(np.asarray(self.states, dtype=complex))
        if self.states.shape[0] != self.energies.size:
            raise ValueError(f"{self.energies.size} energies for {self.states.shape[0]} states")
        order = np.argsort(self.energies, kind="stable")
        if np.any(order != np.arange(self.energies.size)):
            logger.warning("Eigenstates were not in ascending energy order; reordering")
            self.energies = self.energies[order]
            self.states = self.states[order]
            if self.ansatze is not None:
                self.ansatze = [self.ansatze[i] for i in order]

    @property
    def count(self) -> int:
        return self.energies.size

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    def overlaps(self) -> np.ndarray:
        """Matrix of |<psi_i|psi_j>|^2."""
        return np.abs(self.states.conj() @ self.states.T) ** 2

    def max_offdiagonal_overlap(self) -> float:
        if self.count < 2:
            return 0.0
        overlaps = self.overlaps()
        return float(np.max(overlaps[~np.eye(self.count, dtype=bool)]))

    def truncated(self, n_states: int) -> "EigenSet":
        if not 1 <= n_states <= self.count:
            raise ValueError(f"Cannot keep {n_states} of {self.count} eigenstates")
        return EigenSet(
            self.energies[:n_states],
            self.states[:n_states],
            self.provenance,
            None if self.ansatze is None else self.ansatze[:n_states],
            dict(self.diagnostics),
        )

    def to_manifest(self) -> dict:
        manifest = {
            "provenance": self.provenance.value,
            "count": self.count,
            "energies": self.energies.tolist(),
            "states_re": self.states.real.tolist(),
            "states_im": self.states.imag.tolist(),
            "diagnostics": self.diagnostics,
        }
        if self.ansatze is not None:
            manifest["ansatze"] = [a.to_manifest() for a in self.ansatze]
        return manifest

    @classmethod
    def from_manifest(cls, data: dict) -> "EigenSet":
        try:
            states = np.asarray(data["states_re"]) + 1j * np.asarray(data["states_im"])
            ansatze = [Ansatz.from_manifest(a) for a in data["ansatze"]] if "ansatze" in data else None
            return cls(
                np.asarray(data["energies"], dtype=float),
                states,
                Provenance(data["provenance"]),
                ansatze,
                data.get("diagnostics", {}),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid eigenstate manifest: {e}") from e

    def save(self, path: Path) -> Path:
        return save_json(self.to_manifest(), path)

    @classmethod
    def load(cls, path: Path) -> "EigenSet":
        data = load_json(path)
        if data is None:
            raise ConfigError(f"Eigenstate manifest not found: {path}", field_path=str(path))
        return cls.from_manifest(data)
