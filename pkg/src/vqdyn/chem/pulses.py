from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from vqdyn.constants import FS_TO_AU, HARTREE_TO_EV, INTENSITY_AU_W_CM2


def field_units(intensity: float) -> float:
    """
    Peak field amplitude in a.u. for an intensity in W/cm^2.

    Uses I = |eps0|^2 with the atomic intensity unit 3.50944758e16 W/cm^2.
    """
    if intensity < 0:
        raise ValueError(f"Intensity must be non-negative, got {intensity}")
    return float(np.sqrt(intensity / INTENSITY_AU_W_CM2))


class Pulse(ABC):
    """Electric field eps(t); times in atomic units, zero outside [0, duration]."""

    epsilon0: float

    @property
    @abstractmethod
    def duration(self) -> float:
        pass

    @property
    @abstractmethod
    def breakpoints(self) -> Tuple[float, ...]:
        """Times where the piecewise definition changes."""

    @abstractmethod
    def _inside(self, t: np.ndarray) -> np.ndarray:
        pass

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        inside = (t_arr >= 0.0) & (t_arr <= self.duration)
        values = np.where(inside, self._inside(np.clip(t_arr, 0.0, self.duration)), 0.0)
        return float(values) if values.ndim == 0 else values


@dataclass(frozen=True)
class SmoothRectPulse(Pulse):
    """sin^2 ramp up over [0, s1], plateau to s2, sin^2 ramp down to tf."""

    epsilon0: float
    s1: float
    s2: float
    tf: float

    def __post_init__(self):
        if not 0 < self.s1 <= self.s2 < self.tf:
            raise ValueError(f"Pulse timing must satisfy 0 < s1 <= s2 < tf, got {self.s1}, {self.s2}, {self.tf}")

    @classmethod
    def from_fs(cls, epsilon0: float, s1_fs: float, s2_fs: float, tf_fs: float) -> "SmoothRectPulse":
        return cls(epsilon0, s1_fs * FS_TO_AU, s2_fs * FS_TO_AU, tf_fs * FS_TO_AU)

    @property
    def duration(self) -> float:
        return self.tf

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (self.s1, self.s2)

    def _inside(self, t: np.ndarray) -> np.ndarray:
        rise = np.sin(np.pi * t / (2 * self.s1)) ** 2
        fall = np.sin(np.pi * (self.tf - t) / (2 * (self.tf - self.s2))) ** 2
        envelope = np.where(t <= self.s1, rise, np.where(t < self.s2, 1.0, fall))
        return self.epsilon0 * envelope


@dataclass(frozen=True)
class TrapezoidPulse(Pulse):
    """
    Carrier cos(omega t) under a two-cycle sin^2 ramp, an eight-cycle plateau and a
    two-cycle cos^2 ramp; total length 12 periods.

    The ramp-down phase is pi t / 4T - 5 pi / 2, which keeps the envelope continuous at
    10T and zero at 12T.
    """

    epsilon0: float
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"Carrier frequency must be positive, got {self.omega}")

    @classmethod
    def from_ev(cls, epsilon0: float, omega_ev: float) -> "TrapezoidPulse":
        return cls(epsilon0, omega_ev / HARTREE_TO_EV)

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega

    @property
    def duration(self) -> float:
        return 12 * self.period

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (2 * self.period, 10 * self.period)

    def envelope(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        T = self.period
        rise = np.sin(np.pi * t / (4 * T)) ** 2
        fall = np.cos(np.pi * t / (4 * T) - 5 * np.pi / 2) ** 2
        return np.where(t <= 2 * T, rise, np.where(t <= 10 * T, 1.0, fall))

    def _inside(self, t: np.ndarray) -> np.ndarray:
        return self.epsilon0 * self.envelope(t) * np.cos(self.omega * t)


@dataclass(frozen=True)
class ZeroField(Pulse):
    """Field-free evolution over a fixed window."""

    length: float
    epsilon0: float = 0.0

    @property
    def duration(self) -> float:
        return self.length

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    def _inside(self, t: np.ndarray) -> np.ndarray:
        return np.zeros_like(t)
