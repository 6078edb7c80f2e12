from .pulses import Pulse, SmoothRectPulse, TrapezoidPulse, ZeroField, field_units
from .systems import (
    ChemModel,
    DipoleCoupling,
    build_grid,
    build_model,
    build_pulse,
    dipole_operator,
    double_well_potential,
    helium_potential,
)

__all__ = [
    "ChemModel",
    "DipoleCoupling",
    "Pulse",
    "SmoothRectPulse",
    "TrapezoidPulse",
    "ZeroField",
    "build_grid",
    "build_model",
    "build_pulse",
    "dipole_operator",
    "double_well_potential",
    "field_units",
    "helium_potential",
]
