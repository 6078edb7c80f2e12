from .exact import (
    ExactRun,
    ExactTrajectory,
    evolution_operator,
    exact_observables,
    project_populations,
    propagate_exact,
)
from .subspace import (
    SubspaceModel,
    SubspaceTrajectory,
    observables,
    project_hamiltonian,
    propagate_subspace,
)
from .trajectory import Observables, last_recorded_step, output_times, steps_for
from .variational import (
    DrivenHamiltonian,
    EigenSearchResult,
    InstantHamiltonian,
    McLachlanSystem,
    SignConvention,
    VariationalTrajectory,
    assemble_M,
    assemble_f,
    calibrate_sign_convention,
    gradient_descent_evolve,
    imaginary_time_evolve,
    mclachlan_system,
    operator_expectation,
    potential_force_phase_kick,
    propagate_real_time,
    step_imag_time,
    step_real_time,
)
