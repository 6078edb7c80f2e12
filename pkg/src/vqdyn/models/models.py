from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from vqdyn.constants import (
    IMAG_MAX_ITERATIONS,
    IMAG_PLATEAU_PATIENCE,
    IMAG_PLATEAU_TOL,
    INIT_PARAM_SCALE,
    PROTON_MASS,
    RIDGE_LAMBDA,
    VQD_RESTARTS,
)
from vqdyn.errors import InvalidFieldError


class ModelKind(str, Enum):
    DOUBLE_WELL = "double-well"
    HELIUM = "helium"


class PulseShape(str, Enum):
    SMOOTH_RECT = "smooth-rect"
    TRAPEZOID = "trapezoid-carrier"


class ShotMode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


class Scheme(str, Enum):
    EULER = "euler"
    RK4 = "rk4"


class EigenMethod(str, Enum):
    DENSE = "dense"
    VQD = "vqd"


class Optimizer(str, Enum):
    IMAGINARY_TIME = "imaginary-time"
    GRADIENT_DESCENT = "gradient-descent"


class InitKind(str, Enum):
    UNIFORM = "uniform"
    ZEROS = "zeros"


class Reference(str, Enum):
    PLUS = "plus"
    ZERO = "zero"


class EvaluationPath(str, Enum):
    DIRECT = "direct"
    HADAMARD = "hadamard"


class DipoleRoute(str, Enum):
    DIRECT = "direct"
    PHASE_KICK = "phase-kick"


class Window(str, Enum):
    NONE = "none"
    COSINE = "cosine"


def _check(condition: bool, field_path: str, message: str) -> None:
    if not condition:
        raise InvalidFieldError(message, field_path)


@dataclass
class ShotConfig:
    """How expectation values are estimated: exactly, or from `shots` samples per term."""

    mode: ShotMode = ShotMode.EXACT
    shots: int = 1000
    seed: int = 1234

    def __post_init__(self):
        _check(
            self.mode != ShotMode.SAMPLED or self.shots >= 1,
            "shots.shots",
            f"Sampled mode needs shots >= 1, got {self.shots}",
        )

    @property
    def sampled(self) -> bool:
        return self.mode == ShotMode.SAMPLED


@dataclass
class IntegratorConfig:
    """Explicit stepping of the parameter equations; `step` is in atomic units of time."""

    step: float
    scheme: Scheme = Scheme.EULER
    ridge: float = RIDGE_LAMBDA
    path: EvaluationPath = EvaluationPath.DIRECT
    max_threads: int = 4

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"Integrator step must be positive, got {self.step}")


@dataclass
class DoubleWellParams:
    """Tilted double well; energies in hartree, x0 in bohr, grid bounds in angstrom."""

    barrier: float = 0.00625
    asymmetry: float = 0.000257
    x0: float = 1.0
    mass: float = PROTON_MASS
    charge: float = 1.0
    xmin_angstrom: float = -0.8
    xmax_angstrom: float = 0.8
    points: int = 8

    def __post_init__(self):
        _check(
            self.barrier > self.asymmetry / 2 > 0,
            "model.double_well.barrier",
            f"Double well needs barrier > asymmetry/2 > 0, got {self.barrier}, {self.asymmetry}",
        )


@dataclass
class HeliumParams:
    """One-dimensional two-electron helium with soft-Coulomb interactions."""

    softening: float = 0.7397
    xmin_angstrom: float = -2.0
    xmax_angstrom: float = 2.0
    points: int = 8
    mass: float = 1.0
    omega_ev: float = 0.3542
    intensity_w_cm2: float = 3.0e12

    def __post_init__(self):
        _check(self.softening > 0, "model.helium.softening", f"Softening parameter must be positive, got {self.softening}")


@dataclass
class PulseConfig:
    """
    Driving field. The smooth-rect timings are in fs; the trapezoid takes its frequency
    and amplitude from the helium parameters unless epsilon0 is given here.
    """

    shape: PulseShape = PulseShape.SMOOTH_RECT
    enabled: bool = True
    epsilon0: Optional[float] = None
    s1_fs: float = 150.0
    s2_fs: float = 1250.0
    tf_fs: float = 1500.0

    def __post_init__(self):
        _check(
            self.shape != PulseShape.SMOOTH_RECT or 0 < self.s1_fs <= self.s2_fs < self.tf_fs,
            "model.pulse",
            f"Pulse timing must satisfy 0 < s1 <= s2 < tf, got {self.s1_fs}, {self.s2_fs}, {self.tf_fs}",
        )


@dataclass
class ModelConfig:
    kind: ModelKind = ModelKind.DOUBLE_WELL
    double_well: DoubleWellParams = field(default_factory=DoubleWellParams)
    helium: HeliumParams = field(default_factory=HeliumParams)
    pulse: Optional[PulseConfig] = None
    potential_file: Optional[str] = None

    @property
    def grid_size(self) -> int:
        """Number of DVR grid points, the dimension of every state vector."""
        if self.kind == ModelKind.HELIUM:
            return self.helium.points**2
        return self.double_well.points


@dataclass
class AnsatzConfig:
    layers: int = 2
    init: InitKind = InitKind.UNIFORM
    init_scale: float = INIT_PARAM_SCALE
    reference: Reference = Reference.PLUS

    def __post_init__(self):
        _check(self.layers >= 1, "ansatz.layers", f"Ansatz needs at least one layer, got {self.layers}")
        _check(self.init_scale >= 0, "ansatz.init_scale", f"Initial scale must be non-negative, got {self.init_scale}")


@dataclass
class EigenConfig:
    """Eigenstate search; `step` is the imaginary-time step (or learning rate) in a.u."""

    method: EigenMethod = EigenMethod.DENSE
    n_states: int = 2
    optimizer: Optimizer = Optimizer.IMAGINARY_TIME
    step: float = 10.0
    scheme: Scheme = Scheme.EULER
    max_iterations: int = IMAG_MAX_ITERATIONS
    plateau_tol: float = IMAG_PLATEAU_TOL
    patience: int = IMAG_PLATEAU_PATIENCE
    restarts: int = VQD_RESTARTS
    betas: Optional[List[float]] = None
    tolerance: Optional[float] = None

    def __post_init__(self):
        _check(self.n_states >= 1, "eigen.n_states", f"Need at least one eigenstate, got {self.n_states}")
        _check(self.step > 0, "eigen.step", f"Eigen search step must be positive, got {self.step}")
        _check(
            self.max_iterations >= 1,
            "eigen.max_iterations",
            f"Iteration cap must be at least 1, got {self.max_iterations}",
        )
        _check(self.plateau_tol > 0, "eigen.plateau_tol", f"Plateau tolerance must be positive, got {self.plateau_tol}")
        _check(self.patience >= 1, "eigen.patience", f"Patience must be at least 1, got {self.patience}")
        _check(self.restarts >= 0, "eigen.restarts", f"Restarts must be non-negative, got {self.restarts}")
        if self.betas is not None:
            _check(all(b > 0 for b in self.betas), "eigen.betas", f"Penalty weights must be positive, got {self.betas}")
        if self.tolerance is not None:
            _check(self.tolerance > 0, "eigen.tolerance", f"Tolerance must be positive, got {self.tolerance}")


@dataclass
class VQAConfig:
    step_fs: float = 0.002
    scheme: Scheme = Scheme.EULER
    duration_fs: Optional[float] = None
    output_stride: int = 50
    ridge: float = RIDGE_LAMBDA
    path: EvaluationPath = EvaluationPath.DIRECT
    n_populations: int = 2

    def __post_init__(self):
        _check(self.step_fs > 0, "vqa.step_fs", f"VQA step must be positive, got {self.step_fs}")
        _check(self.output_stride >= 1, "vqa.output_stride", f"Output stride must be at least 1, got {self.output_stride}")
        _check(self.ridge >= 0, "vqa.ridge", f"Ridge must be non-negative, got {self.ridge}")
        _check(self.n_populations >= 1, "vqa.n_populations", f"Need at least one population, got {self.n_populations}")


@dataclass
class SubspaceConfig:
    n_states: int = 2
    step_fs: float = 0.01
    duration_fs: Optional[float] = None
    output_stride: int = 10
    dipole_route: DipoleRoute = DipoleRoute.DIRECT

    def __post_init__(self):
        _check(self.n_states >= 1, "subspace.n_states", f"Subspace needs at least one state, got {self.n_states}")
        _check(self.step_fs > 0, "subspace.step_fs", f"Subspace step must be positive, got {self.step_fs}")
        _check(
            self.output_stride >= 1,
            "subspace.output_stride",
            f"Output stride must be at least 1, got {self.output_stride}",
        )


@dataclass
class ExactConfig:
    step_fs: float = 0.1
    duration_fs: Optional[float] = None
    output_stride: int = 1
    n_populations: int = 2

    def __post_init__(self):
        _check(self.step_fs > 0, "exact.step_fs", f"Exact propagation step must be positive, got {self.step_fs}")
        _check(
            self.output_stride >= 1,
            "exact.output_stride",
            f"Output stride must be at least 1, got {self.output_stride}",
        )
        _check(
            self.n_populations >= 1,
            "exact.n_populations",
            f"Need at least one population, got {self.n_populations}",
        )


@dataclass
class SpectrumConfig:
    window: Window = Window.NONE
    pad_factor: int = 4
    max_order: float = 40.0
    input: Optional[str] = None
    column: str = "dipole"

    def __post_init__(self):
        _check(self.pad_factor >= 1, "spectrum.pad_factor", f"Padding factor must be at least 1, got {self.pad_factor}")
        _check(self.max_order > 0, "spectrum.max_order", f"Maximum order must be positive, got {self.max_order}")


@dataclass
class ExecutionConfig:
    max_threads: int = 4

    def __post_init__(self):
        _check(self.max_threads >= 1, "execution.max_threads", f"Need at least one thread, got {self.max_threads}")


@dataclass
class WorkflowConfig:
    """
    A complete workflow definition, loaded from `src/workflows/<name>.yaml`.
    Every section is optional and falls back to the model defaults.
    """

    name: str
    description: Optional[str] = None
    model: ModelConfig = field(default_factory=ModelConfig)
    ansatz: AnsatzConfig = field(default_factory=AnsatzConfig)
    eigen: EigenConfig = field(default_factory=EigenConfig)
    vqa: VQAConfig = field(default_factory=VQAConfig)
    subspace: SubspaceConfig = field(default_factory=SubspaceConfig)
    exact: ExactConfig = field(default_factory=ExactConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    shots: ShotConfig = field(default_factory=ShotConfig)
    execution: ExecutionConfig = field(default_factory=ExecutionConfig)

    def __post_init__(self):
        size = self.model.grid_size
        for field_path, count in (
            ("eigen.n_states", self.eigen.n_states),
            ("subspace.n_states", self.subspace.n_states),
            ("exact.n_populations", self.exact.n_populations),
            ("vqa.n_populations", self.vqa.n_populations),
        ):
            _check(count <= size, field_path, f"{count} states requested on a {size}-point grid")
