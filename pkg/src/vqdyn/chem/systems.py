import logging
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np

from vqdyn.chem.pulses import Pulse, SmoothRectPulse, TrapezoidPulse, ZeroField, field_units
from vqdyn.dvr import (
    DVRGrid,
    GridOperator,
    OperatorKind,
    build_potential,
    hamiltonian_from_potential,
    load_tabulated_potential,
)
from vqdyn.models.models import (
    DoubleWellParams,
    HeliumParams,
    ModelConfig,
    ModelKind,
    PulseConfig,
    PulseShape,
)

logger = logging.getLogger(__name__)


def double_well_potential(x, params: DoubleWellParams = DoubleWellParams()):
    """Tilted double well (D/2x0)(x - x0) + ((V - D/2)/x0^4)(x - x0)^2 (x + x0)^2."""
    x = np.asarray(x, dtype=float)
    x0 = params.x0
    tilt = params.asymmetry / (2 * x0) * (x - x0)
    quartic = (params.barrier - params.asymmetry / 2) / x0**4 * (x - x0) ** 2 * (x + x0) ** 2
    return tilt + quartic


def helium_potential(x, y, softening: float = HeliumParams.softening):
    """Two soft-Coulomb nuclear attractions plus the soft electron-electron repulsion."""
    a2 = softening**2
    return (
        -2.0 / np.sqrt(x**2 + a2)
        - 2.0 / np.sqrt(y**2 + a2)
        + 1.0 / np.sqrt((x - y) ** 2 + a2)
    )


@dataclass(frozen=True, eq=False)
class DipoleCoupling:
    """
    Dipole operator together with its sign conventions.

    H_I(t) = field_sign * eps(t) * operator and d(t) = dipole_sign * <operator>.
    """

    operator: GridOperator
    field_sign: float
    dipole_sign: float

    def interaction_dense(self) -> np.ndarray:
        """field_sign * operator, to be multiplied by eps(t)."""
        return self.field_sign * self.operator.dense()


def dipole_operator(kind: ModelKind, grid: DVRGrid, charge: float = 1.0) -> DipoleCoupling:
    """
    Double well: mu = q x with H_I = -mu eps(t).
    Helium: the operator x + y with H_I = +eps(t)(x + y) and d(t) = -<x + y>.
    """
    if kind == ModelKind.DOUBLE_WELL:
        values = charge * grid.flat_coordinates(0)
        return DipoleCoupling(GridOperator(OperatorKind.DIAGONAL, grid, values), -1.0, 1.0)
    values = sum(grid.flat_coordinates(a) for a in range(grid.dims))
    return DipoleCoupling(GridOperator(OperatorKind.DIAGONAL, grid, values), 1.0, -1.0)


@dataclass(frozen=True, eq=False)
class ChemModel:
    kind: ModelKind
    grid: DVRGrid
    potential: GridOperator
    hamiltonian: GridOperator
    dipole: DipoleCoupling
    pulse: Pulse


def build_grid(config: ModelConfig) -> DVRGrid:
    if config.kind == ModelKind.DOUBLE_WELL:
        p = config.double_well
        return DVRGrid.from_angstrom(1, p.points, p.xmin_angstrom, p.xmax_angstrom, p.mass)
    p = config.helium
    return DVRGrid.from_angstrom(2, p.points, p.xmin_angstrom, p.xmax_angstrom, p.mass)


def build_pulse(config: ModelConfig) -> Pulse:
    """Pulse from the config, defaulting to the model's standard driving field."""
    pulse_cfg = config.pulse
    if pulse_cfg is None:
        shape = PulseShape.SMOOTH_RECT if config.kind == ModelKind.DOUBLE_WELL else PulseShape.TRAPEZOID
        pulse_cfg = PulseConfig(shape=shape)

    if pulse_cfg.shape == PulseShape.SMOOTH_RECT:
        eps0 = 0.00137 if pulse_cfg.epsilon0 is None else pulse_cfg.epsilon0
        pulse = SmoothRectPulse.from_fs(eps0, pulse_cfg.s1_fs, pulse_cfg.s2_fs, pulse_cfg.tf_fs)
    else:
        he = config.helium
        eps0 = field_units(he.intensity_w_cm2) if pulse_cfg.epsilon0 is None else pulse_cfg.epsilon0
        pulse = TrapezoidPulse.from_ev(eps0, he.omega_ev)

    if not pulse_cfg.enabled:
        return ZeroField(pulse.duration)
    return pulse


def build_model(config: ModelConfig) -> ChemModel:
    """Assemble grid, H_0, dipole coupling and pulse for a configured model."""
    grid = build_grid(config)
    if config.potential_file:
        potential = load_tabulated_potential(Path(config.potential_file), grid)
    elif config.kind == ModelKind.DOUBLE_WELL:
        potential = build_potential(grid, partial(double_well_potential, params=config.double_well))
    else:
        potential = build_potential(grid, partial(helium_potential, softening=config.helium.softening))

    charge = config.double_well.charge if config.kind == ModelKind.DOUBLE_WELL else 1.0
    model = ChemModel(
        kind=config.kind,
        grid=grid,
        potential=potential,
        hamiltonian=hamiltonian_from_potential(potential),
        dipole=dipole_operator(config.kind, grid, charge),
        pulse=build_pulse(config),
    )
    logger.debug(f"Built {config.kind.value} model on {grid.size} grid points ({grid.n_qubits} qubits)")
    return model
