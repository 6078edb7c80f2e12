import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks
from scipy.signal.windows import tukey

from vqdyn.errors import SpectrumError
from vqdyn.models.models import Window
from vqdyn.util.io import write_csv

logger = logging.getLogger(__name__)

# fraction of the window tapered by the cosine ramp
COSINE_RAMP_FRACTION = 0.1


@dataclass
class SpectrumResult:
    """I(omega) = |int d(t) e^{i omega t} dt|^2 in arbitrary units, up to the Nyquist limit."""

    omega: np.ndarray
    intensity: np.ndarray
    carrier: float
    duration: float
    dt: float
    n_fft: int

    @property
    def orders(self) -> np.ndarray:
        return self.omega / self.carrier

    @property
    def resolution(self) -> float:
        """Natural frequency resolution 2 pi / duration (before any zero padding)."""
        return 2 * np.pi / self.duration

    def total_power(self) -> float:
        """Sum over the two-sided spectrum of I * d omega / 2 pi; equals dt * sum d_n^2."""
        weights = np.full(self.intensity.size, 2.0)
        weights[0] = 1.0
        if self.n_fft % 2 == 0:
            weights[-1] = 1.0
        return float(np.sum(weights * self.intensity) / (self.n_fft * self.dt))

    def normalized_to_fundamental(self) -> np.ndarray:
        """Intensity divided by the strongest value between orders 0.5 and 1.5."""
        band = (self.orders >= 0.5) & (self.orders <= 1.5)
        if not np.any(band):
            raise SpectrumError("Spectrum does not resolve the fundamental")
        reference = np.max(self.intensity[band])
        if reference <= 0:
            raise SpectrumError("Fundamental has zero intensity")
        return self.intensity / reference

    def peak_orders(self, max_order: float = 40.0, prominence: float = 1.0) -> np.ndarray:
        """Harmonic orders of peaks standing `prominence` decades above their surroundings."""
        keep = self.orders <= max_order
        log_intensity = np.log10(self.intensity[keep] + np.finfo(float).tiny)
        peaks, _ = find_peaks(log_intensity, prominence=prominence)
        return self.orders[keep][peaks]

    def to_csv(self, path: Path) -> Path:
        rows = np.column_stack([self.orders, self.omega, self.intensity])
        return write_csv(path, ["harmonic_order", "omega_au", "intensity"], rows.tolist())


def hhg_spectrum(
    times: np.ndarray,
    dipole: np.ndarray,
    carrier: float,
    window: Window = Window.NONE,
    pad_factor: int = 1,
) -> SpectrumResult:
    """
    Power spectrum of the dipole over the full sampled window.

    The time grid must be uniform. Zero padding only interpolates the frequency axis.
    """
    times = np.asarray(times, dtype=float)
    dipole = np.asarray(dipole, dtype=float)
    if times.ndim != 1 or times.size != dipole.size or times.size < 2:
        raise SpectrumError("Spectrum needs matching one-dimensional time and dipole arrays")
    steps = np.diff(times)
    dt = float(steps[0])
    if dt <= 0 or not np.allclose(steps, dt, rtol=1e-6, atol=0.0):
        raise SpectrumError("Dipole time grid is not uniform")
    if pad_factor < 1:
        raise SpectrumError(f"pad_factor must be >= 1, got {pad_factor}")

    signal = dipole
    if window == Window.COSINE:
        signal = dipole * tukey(dipole.size, COSINE_RAMP_FRACTION)
    n_fft = dipole.size * pad_factor
    transform = dt * np.fft.rfft(signal, n=n_fft)
    omega = 2 * np.pi * np.fft.rfftfreq(n_fft, d=dt)
    result = SpectrumResult(omega, np.abs(transform) ** 2, carrier, dt * dipole.size, dt, n_fft)
    logger.debug(f"Spectrum: {omega.size} bins, resolution {result.resolution:.3e} a.u.")
    return result
