import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from vqdyn.constants import AU_TIME_FS, FS_TO_AU
from vqdyn.util.io import write_csv

logger = logging.getLogger(__name__)


@dataclass
class Observables:
    """
    Time series shared by every propagator: times in a.u., eigenbasis amplitudes c_i(t),
    populations |c_i|^2 and the dipole signal d(t).
    """

    times: np.ndarray
    amplitudes: np.ndarray
    dipole: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def times_fs(self) -> np.ndarray:
        return self.times * AU_TIME_FS

    @property
    def n_states(self) -> int:
        return self.amplitudes.shape[1]

    def header(self) -> List[str]:
        n = self.n_states
        return (
            ["time_fs"]
            + [f"P_{i}" for i in range(n)]
            + [f"re_c_{i}" for i in range(n)]
            + [f"im_c_{i}" for i in range(n)]
            + ["dipole"]
        )

    def to_csv(self, path: Path) -> Path:
        rows = np.column_stack(
            [self.times_fs, self.populations, self.amplitudes.real, self.amplitudes.imag, self.dipole]
        )
        return write_csv(path, self.header(), rows.tolist())


def last_recorded_step(n_steps: int, stride: int) -> int:
    """
    Final step of a run recorded every `stride` steps. Trailing steps that do not fill a
    whole stride are dropped so the samples stay uniformly spaced.
    """
    stride = max(1, stride)
    last = n_steps - n_steps % stride
    if last != n_steps:
        logger.warning(
            f"Output stride {stride} does not divide {n_steps} steps; the last {n_steps - last} steps are not recorded"
        )
    return last


def output_times(duration: float, step: float, stride: int = 1, start: float = 0.0) -> np.ndarray:
    """Uniform sample times start, start + stride*step, ... up to the last whole stride in `duration`."""
    n_steps = int(round(duration / step))
    indices = np.arange(0, last_recorded_step(n_steps, stride) + 1, max(1, stride))
    return start + indices * step


def steps_for(duration_fs: Optional[float], default_duration: float, step_fs: float) -> int:
    duration = default_duration if duration_fs is None else duration_fs * FS_TO_AU
    return int(round(duration / (step_fs * FS_TO_AU)))
