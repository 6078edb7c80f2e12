import logging
import os
import shutil
import tempfile
from dataclasses import asdict
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from vqdyn.analysis import Method, estimate_circuits, hhg_spectrum
from vqdyn.ansatz import Ansatz, build_hva
from vqdyn.chem import ChemModel, build_model
from vqdyn.constants import EIGEN_MANIFEST, FS_TO_AU, RUN_MANIFEST
from vqdyn.dynamics import (
    DrivenHamiltonian,
    ExactRun,
    Observables,
    exact_observables,
    gradient_descent_evolve,
    imaginary_time_evolve,
    observables,
    output_times,
    project_hamiltonian,
    propagate_exact,
    propagate_real_time,
    propagate_subspace,
    steps_for,
)
from vqdyn.errors import ConfigError
from vqdyn.models import EigenMethod, IntegratorConfig, Optimizer, ShotConfig, WorkflowConfig
from vqdyn.pauli import PauliSum, encode_operator
from vqdyn.spectral import EigenSet, dense_eigensolve, vqd_find
from vqdyn.usecase import WorkflowLoader
from vqdyn.util.io import get_platform_info, read_csv_columns, save_json, write_csv
from vqdyn.util.version_utils import get_dependency_versions


class Command(str, Enum):
    EIGEN = "eigen"
    EVOLVE_VQA = "evolve-vqa"
    EVOLVE_SUBSPACE = "evolve-subspace"
    EVOLVE_EXACT = "evolve-exact"
    SPECTRUM = "spectrum"
    RESOURCES = "resources"


# workflow field that --step sets for each command, with the fs -> field unit factor
_STEP_FIELDS = {
    Command.EIGEN: ("eigen.step", FS_TO_AU),
    Command.EVOLVE_VQA: ("vqa.step_fs", 1.0),
    Command.EVOLVE_SUBSPACE: ("subspace.step_fs", 1.0),
    Command.EVOLVE_EXACT: ("exact.step_fs", 1.0),
    Command.SPECTRUM: ("exact.step_fs", 1.0),
}


def shot_settings(shots: str) -> List[str]:
    """Translate a --shots value ('exact' or a positive count) into workflow settings."""
    value = str(shots).strip().lower()
    if value == "exact":
        return ["shots.mode=exact"]
    try:
        count = int(value)
    except ValueError:
        raise ConfigError(f"--shots expects 'exact' or a positive integer, got '{shots}'", field_path="shots") from None
    if count < 1:
        raise ConfigError(f"--shots must be positive, got {count}", field_path="shots.shots")
    return ["shots.mode=sampled", f"shots.shots={count}"]


def _plain(items) -> dict:
    return {key: (value.value if isinstance(value, Enum) else value) for key, value in items}


class WorkflowEngine:
    """
    Runs one command of a workflow end to end.

    Outputs are written to a staging directory inside `out_dir` and moved into place
    together with `run_manifest.json` once the command succeeds. A failed run leaves
    nothing behind and keeps the outputs of earlier runs.
    """

    def __init__(self, **args):
        self._logger = logging.getLogger(__name__)
        self.command = Command(args["command"])
        self.workflow_name = args.get("workflow", "double_well")
        self.out_dir = Path(args.get("out_dir", "results"))
        self.eigen_path: Optional[Path] = args.get("eigen_path")
        self.input_path: Optional[Path] = args.get("input_path")

        settings: List[str] = list(args.get("settings", []))
        if args.get("seed") is not None:
            settings.append(f"shots.seed={int(args['seed'])}")
        if args.get("shots") is not None:
            settings.extend(shot_settings(args["shots"]))
        if args.get("step_fs") is not None and self.command in _STEP_FIELDS:
            field_path, factor = _STEP_FIELDS[self.command]
            settings.append(f"{field_path}={float(args['step_fs']) * factor!r}")
        self.settings = settings

        self.workflow_loader = WorkflowLoader(self._logger)
        self.workflow: Optional[WorkflowConfig] = None
        self.artifacts: List[str] = []

        self._handlers: Dict[Command, Callable[[ChemModel, Path], List[str]]] = {
            Command.EIGEN: self._run_eigen,
            Command.EVOLVE_VQA: self._run_vqa,
            Command.EVOLVE_SUBSPACE: self._run_subspace,
            Command.EVOLVE_EXACT: self._run_exact,
            Command.SPECTRUM: self._run_spectrum,
            Command.RESOURCES: self._run_resources,
        }

    @property
    def shots(self) -> ShotConfig:
        return self.workflow.shots

    @property
    def max_threads(self) -> int:
        return max(1, self.workflow.execution.max_threads)

    def start(self) -> List[Path]:
        """Load the workflow, run the command and return the paths of the written artifacts."""
        self.workflow = self.workflow_loader.load_workflow(self.workflow_name, self.settings)
        self._logger.info(f"Running '{self.command.value}' for workflow '{self.workflow.name}'")

        self.out_dir.mkdir(parents=True, exist_ok=True)
        stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.out_dir))
        started = datetime.now().isoformat(timespec="seconds")
        try:
            model = build_model(self.workflow.model)
            self.artifacts = self._handlers[self.command](model, stage)
            self._write_manifest(stage, started)
            written = self._commit(stage, self.artifacts + [RUN_MANIFEST])
        except Exception as e:
            self._logger.error(f"'{self.command.value}' failed, partial outputs removed: {e}")
            raise
        finally:
            shutil.rmtree(stage, ignore_errors=True)

        self._logger.info(f"'{self.command.value}' finished; {len(written)} files in {self.out_dir}")
        return written

    def _commit(self, stage: Path, names: List[str]) -> List[Path]:
        """
        Move staged files into `out_dir`. Files they replace are parked in the stage first,
        so a failed move puts the previous outputs back and removes the new ones.
        """
        previous = stage / ".previous"
        parked: List[str] = []
        moved: List[Path] = []
        try:
            for name in names:
                target = self.out_dir / name
                if target.exists():
                    (previous / name).parent.mkdir(parents=True, exist_ok=True)
                    os.replace(target, previous / name)
                    parked.append(name)
            for name in names:
                target = self.out_dir / name
                os.replace(stage / name, target)
                moved.append(target)
                self._logger.debug(f"Artifact written: {target}")
        except OSError:
            for target in moved:
                target.unlink(missing_ok=True)
            for name in parked:
                os.replace(previous / name, self.out_dir / name)
            self._logger.warning(f"Restored {len(parked)} previous outputs in {self.out_dir}")
            raise
        return moved

    def _write_manifest(self, stage: Path, started: str) -> None:
        save_json(
            {
                "command": self.command.value,
                "workflow": self.workflow.name,
                "config": asdict(self.workflow, dict_factory=_plain),
                "settings": self.settings,
                "seed": self.shots.seed,
                "shot_mode": self.shots.mode.value,
                "shots": self.shots.shots if self.shots.sampled else None,
                "eigen_manifest": str(self.eigen_path) if self.eigen_path else None,
                "input": str(self.input_path) if self.input_path else None,
                "versions": get_dependency_versions(),
                "platform": get_platform_info(),
                "started": started,
                "finished": datetime.now().isoformat(timespec="seconds"),
                "artifacts": list(self.artifacts),
            },
            stage / RUN_MANIFEST,
        )

    # eigenstates

    def _imag_config(self) -> IntegratorConfig:
        eigen = self.workflow.eigen
        return IntegratorConfig(step=eigen.step, scheme=eigen.scheme, max_threads=self.max_threads)

    def _solve_eigen(self, model: ChemModel, n_states: int) -> EigenSet:
        eigen_cfg = self.workflow.eigen
        if eigen_cfg.method == EigenMethod.DENSE:
            return dense_eigensolve(model.hamiltonian, n_states)

        references = None
        if eigen_cfg.tolerance is not None:
            references = dense_eigensolve(model.hamiltonian, n_states).energies
        return vqd_find(
            encode_operator(model.hamiltonian),
            n_states,
            betas=eigen_cfg.betas,
            imag_cfg=self._imag_config(),
            ansatz_cfg=self.workflow.ansatz,
            eigen_cfg=eigen_cfg,
            shots=self.shots,
            reference_energies=references,
            seed=self.shots.seed,
        )

    def _eigenstates(self, model: ChemModel, n_states: int) -> EigenSet:
        if self.eigen_path is None:
            return self._solve_eigen(model, n_states)
        eigen = EigenSet.load(self.eigen_path)
        if eigen.count < n_states:
            raise ConfigError(
                f"Eigen manifest {self.eigen_path} holds {eigen.count} states, {n_states} needed",
                field_path="subspace.n_states",
            )
        if eigen.dimension != model.grid.size:
            raise ConfigError(
                f"Eigen manifest {self.eigen_path} has dimension {eigen.dimension}, model grid has {model.grid.size}"
            )
        self._logger.info(f"Using {n_states} eigenstates from {self.eigen_path}")
        return eigen.truncated(n_states)

    def _duration(self, model: ChemModel, duration_fs: Optional[float]) -> float:
        return model.pulse.duration if duration_fs is None else duration_fs * FS_TO_AU

    # commands

    def _run_eigen(self, model: ChemModel, stage: Path) -> List[str]:
        eigen = self._solve_eigen(model, self.workflow.eigen.n_states)
        eigen.save(stage / EIGEN_MANIFEST)
        write_csv(
            stage / "eigen_energies.csv",
            ["state", "energy_hartree"],
            [(k, float(e)) for k, e in enumerate(eigen.energies)],
        )
        return [EIGEN_MANIFEST, "eigen_energies.csv"]

    def _run_subspace(self, model: ChemModel, stage: Path) -> List[str]:
        cfg = self.workflow.subspace
        eigen = self._eigenstates(model, cfg.n_states)
        sub_model = project_hamiltonian(eigen, model.dipole, model.pulse, cfg.dipole_route)
        times = output_times(self._duration(model, cfg.duration_fs), cfg.step_fs * FS_TO_AU, cfg.output_stride)
        trajectory = propagate_subspace(sub_model, times)
        observables(sub_model, trajectory).to_csv(stage / "subspace_trajectory.csv")
        return ["subspace_trajectory.csv"]

    def _exact_observables(self, model: ChemModel) -> Observables:
        cfg = self.workflow.exact
        if self.eigen_path is not None:
            eigen = self._eigenstates(model, cfg.n_populations)
        else:
            eigen = dense_eigensolve(model.hamiltonian, cfg.n_populations)
        run = ExactRun.from_model(model, eigen.states[0], cfg.step_fs, cfg.duration_fs, cfg.output_stride)
        self._logger.info(f"Exact propagation: {run.n_steps} steps of {cfg.step_fs} fs")
        return exact_observables(propagate_exact(run), eigen, model.dipole)

    def _run_exact(self, model: ChemModel, stage: Path) -> List[str]:
        self._exact_observables(model).to_csv(stage / "exact_trajectory.csv")
        return ["exact_trajectory.csv"]

    def _spectrum_source(self) -> Optional[Path]:
        source = self.input_path or self.workflow.spectrum.input
        return Path(source) if source else None

    def _run_spectrum(self, model: ChemModel, stage: Path) -> List[str]:
        cfg = self.workflow.spectrum
        artifacts = []
        source = self._spectrum_source()
        if source is None:
            self._logger.info("No dipole input given; running exact propagation first")
            trajectory = self._exact_observables(model)
            trajectory.to_csv(stage / "exact_trajectory.csv")
            artifacts.append("exact_trajectory.csv")
            times, signal = trajectory.times, trajectory.dipole
        else:
            if not source.is_file():
                raise ConfigError(f"Spectrum input not found: {source}", field_path="spectrum.input")
            columns = read_csv_columns(source)
            if cfg.column not in columns or "time_fs" not in columns:
                raise ConfigError(
                    f"{source} needs 'time_fs' and '{cfg.column}' columns, found {sorted(columns)}",
                    field_path="spectrum.column",
                )
            times, signal = columns["time_fs"] * FS_TO_AU, columns[cfg.column]

        carrier = getattr(model.pulse, "omega", None)
        if carrier is None:
            self._logger.info("Pulse has no carrier; spectrum axis is angular frequency in a.u.")
            carrier = 1.0
        result = hhg_spectrum(times, signal, carrier, cfg.window, cfg.pad_factor)
        result.to_csv(stage / "spectrum.csv")
        save_json(
            {
                "carrier_au": float(carrier),
                "resolution_au": result.resolution,
                "total_power": result.total_power(),
                "peak_orders": result.peak_orders(cfg.max_order),
            },
            stage / "spectrum_peaks.json",
        )
        return artifacts + ["spectrum.csv", "spectrum_peaks.json"]

    def _ground_ansatz(self, h0: PauliSum) -> Ansatz:
        """Imaginary-time (or gradient-descent) ground state used as the real-time initial condition."""
        if self.eigen_path is not None:
            eigen = EigenSet.load(self.eigen_path)
            if eigen.ansatze:
                self._logger.info(f"Starting from the ground-state ansatz in {self.eigen_path}")
                return eigen.ansatze[0]
            self._logger.warning(f"{self.eigen_path} has no ansatz parameters; searching the ground state")

        ansatz_cfg, eigen_cfg = self.workflow.ansatz, self.workflow.eigen
        start = build_hva(
            h0, ansatz_cfg.layers, ansatz_cfg.init, ansatz_cfg.init_scale, self.shots.seed, ansatz_cfg.reference
        )
        if eigen_cfg.optimizer == Optimizer.GRADIENT_DESCENT:
            result = gradient_descent_evolve(
                start, h0, eigen_cfg.step, eigen_cfg.max_iterations, eigen_cfg.plateau_tol, eigen_cfg.patience, self.shots
            )
        else:
            result = imaginary_time_evolve(
                start,
                h0,
                self._imag_config(),
                eigen_cfg.max_iterations,
                eigen_cfg.plateau_tol,
                eigen_cfg.patience,
                self.shots,
            )
        if not result.converged:
            self._logger.warning(f"Ground-state search hit the iteration cap at E = {result.energy:.8f}")
        self._logger.info(f"Ground-state ansatz: E = {result.energy:.10f} hartree")
        return result.ansatz

    def _run_vqa(self, model: ChemModel, stage: Path) -> List[str]:
        cfg = self.workflow.vqa
        h0 = encode_operator(model.hamiltonian)
        coupling = encode_operator(model.dipole.operator) * model.dipole.field_sign
        hamiltonian = DrivenHamiltonian(h0, coupling, model.pulse)

        ansatz = self._ground_ansatz(h0)
        ansatz.save(stage / "vqa_initial_ansatz.yaml")

        integrator = IntegratorConfig(
            step=cfg.step_fs * FS_TO_AU, scheme=cfg.scheme, ridge=cfg.ridge, path=cfg.path, max_threads=self.max_threads
        )
        n_steps = steps_for(cfg.duration_fs, model.pulse.duration, cfg.step_fs)
        self._logger.info(f"Real-time VQA: {n_steps} steps of {cfg.step_fs} fs, {ansatz.n_params} parameters")
        trajectory = propagate_real_time(ansatz, hamiltonian, integrator, n_steps, stride=cfg.output_stride, shots=self.shots)
        ansatz.with_params(trajectory.params[-1]).save(stage / "vqa_final_ansatz.yaml")

        reference = dense_eigensolve(model.hamiltonian, cfg.n_populations)
        populations = np.abs(trajectory.states @ reference.states.conj().T) ** 2
        position = model.dipole.operator.diagonal()
        dipole = model.dipole.dipole_sign * (np.abs(trajectory.states) ** 2 @ position)

        header = (
            ["time_fs", "energy", "dipole"]
            + [f"P_{i}" for i in range(populations.shape[1])]
            + [f"theta_{k}" for k in range(trajectory.params.shape[1])]
        )
        rows = np.column_stack(
            [trajectory.times / FS_TO_AU, trajectory.energies, dipole, populations, trajectory.params]
        )
        write_csv(stage / "vqa_trajectory.csv", header, rows.tolist())
        return ["vqa_initial_ansatz.yaml", "vqa_trajectory.csv", "vqa_final_ansatz.yaml"]

    def _run_resources(self, model: ChemModel, stage: Path) -> List[str]:
        h0 = encode_operator(model.hamiltonian)
        ansatz = build_hva(h0, self.workflow.ansatz.layers, reference=self.workflow.ansatz.reference)
        grid = model.grid
        estimates = [estimate_circuits(ansatz.n_params, grid.dims, grid.points_per_dim, m) for m in Method]
        for estimate in estimates:
            self._logger.info(f"{estimate.method.value}: {estimate.total} circuits per step")
        save_json(
            {
                "model": self.workflow.model.kind.value,
                "n_qubits": grid.n_qubits,
                "n_params": ansatz.n_params,
                "layers": self.workflow.ansatz.layers,
                "estimates": [e.to_dict() for e in estimates],
            },
            stage / "resources.json",
        )
        return ["resources.json"]


def run_workflow(command: str, workflow: str, out_dir: Path, settings: Sequence[str] = (), **options) -> List[Path]:
    """Library entry point mirroring the CLI subcommands."""
    return WorkflowEngine(command=command, workflow=workflow, out_dir=out_dir, settings=list(settings), **options).start()
