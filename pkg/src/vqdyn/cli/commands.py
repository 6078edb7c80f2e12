import signal
import sys
from enum import Enum
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from vqdyn.engine import Command, WorkflowEngine
from vqdyn.errors import ConfigError, ConvergenceError, VqdynError
from vqdyn.usecase import WorkflowLoader
from vqdyn.util import FileSystem
from vqdyn.util.logging import configure_logging
from vqdyn.util.version_utils import get_current_version, get_dependency_versions

app = typer.Typer(
    help="vqdyn - variational quantum simulation of real-space chemical dynamics.",
    add_completion=True,
)

console = Console()

VERSION = get_current_version()


class LogLevel(str, Enum):
    """Enum for log levels"""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


def print_styled(message: str, style: str = "green", bold: bool = False, panel: bool = False):
    """Print styled message using Rich"""
    text = Text(message)
    text.stylize(style)
    if bold:
        text.stylize("bold")

    if panel:
        console.print(Panel(text))
    else:
        console.print(text)


CONFIG_OPTION = typer.Option(
    None, "--config", "-c", help="Workflow name or path to a workflow YAML file (default from settings)"
)
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output directory (default from settings)")
SEED_OPTION = typer.Option(None, "--seed", help="Seed for parameter initialisation and shot sampling")
SHOTS_OPTION = typer.Option(None, "--shots", help="'exact' or the number of shots per measured term")
STEP_OPTION = typer.Option(None, "--step", help="Time step in fs for the command's propagation")
SET_OPTION = typer.Option(
    [], "--set", "-s", help="Override a workflow value (e.g., 'subspace.n_states=6')"
)
EIGEN_OPTION = typer.Option(None, "--eigen", "-e", help="Reuse eigenstates from an eigenset.json manifest")
LOG_LEVEL_OPTION = typer.Option(LogLevel.INFO, "--log-level", "-l", help="Set the logging level")
VERBOSE_OPTION = typer.Option(
    False, "--verbose", "-v", help="Enable verbose output (equivalent to --log-level=DEBUG)"
)
QUIET_OPTION = typer.Option(
    False, "--quiet", "-q", help="Suppress output below ERROR (equivalent to --log-level=ERROR)"
)


def _defaults() -> dict:
    return FileSystem.load_configuration().get("defaults", {}) or {}


def _default_out() -> Path:
    return Path(_defaults().get("output_directory", "results"))


def _default_workflow() -> str:
    return str(_defaults().get("workflow", "double_well"))


def _execute(
    command: Command,
    config: Optional[str],
    out: Optional[Path],
    seed: Optional[int],
    shots: Optional[str],
    step: Optional[float],
    settings: List[str],
    log_level: LogLevel,
    verbose: bool,
    quiet: bool,
    eigen: Optional[Path] = None,
    input_path: Optional[Path] = None,
) -> None:
    level = log_level.value
    if verbose:
        level = LogLevel.DEBUG.value
    elif quiet:
        level = LogLevel.ERROR.value

    config = config or _default_workflow()
    logger = configure_logging(log_level=level)
    logger.info(f"vqdyn {VERSION}: {command.value} with workflow '{config}'")

    out_dir = out or _default_out()
    try:
        written = WorkflowEngine(
            command=command,
            workflow=config,
            out_dir=out_dir,
            settings=settings,
            seed=seed,
            shots=shots,
            step_fs=step,
            eigen_path=eigen,
            input_path=input_path,
        ).start()
    except ConfigError as e:
        location = f" (at {e.field_path})" if e.field_path else ""
        print_styled(f"Configuration error{location}: {e}", style="red", bold=True)
        raise typer.Exit(code=1)
    except ConvergenceError as e:
        print_styled(f"Did not converge: {e}", style="red", bold=True)
        for key, value in e.diagnostics.items():
            console.print(f"  {key}: {value}")
        raise typer.Exit(code=1)
    except VqdynError as e:
        print_styled(f"{type(e).__name__}: {e}", style="red", bold=True)
        raise typer.Exit(code=1)

    print_styled(f"{command.value} finished, outputs in {out_dir}", style="green", bold=True)
    for path in written:
        console.print(f"  {path.name}")


@app.command("eigen")
def eigen_command(
    config: Optional[str] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    seed: Optional[int] = SEED_OPTION,
    shots: Optional[str] = SHOTS_OPTION,
    step: Optional[float] = STEP_OPTION,
    settings: List[str] = SET_OPTION,
    log_level: LogLevel = LOG_LEVEL_OPTION,
    verbose: bool = VERBOSE_OPTION,
    quiet: bool = QUIET_OPTION,
):
    """Find the lowest eigenstates (dense oracle or VQD) and write an EigenSet manifest."""
    _execute(Command.EIGEN, config, out, seed, shots, step, settings, log_level, verbose, quiet)


@app.command("evolve-vqa")
def evolve_vqa_command(
    config: Optional[str] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    seed: Optional[int] = SEED_OPTION,
    shots: Optional[str] = SHOTS_OPTION,
    step: Optional[float] = STEP_OPTION,
    settings: List[str] = SET_OPTION,
    eigen: Optional[Path] = EIGEN_OPTION,
    log_level: LogLevel = LOG_LEVEL_OPTION,
    verbose: bool = VERBOSE_OPTION,
    quiet: bool = QUIET_OPTION,
):
    """Propagate the ground-state ansatz in real time under the pulse (McLachlan VQA)."""
    _execute(Command.EVOLVE_VQA, config, out, seed, shots, step, settings, log_level, verbose, quiet, eigen)


@app.command("evolve-subspace")
def evolve_subspace_command(
    config: Optional[str] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    seed: Optional[int] = SEED_OPTION,
    shots: Optional[str] = SHOTS_OPTION,
    step: Optional[float] = STEP_OPTION,
    settings: List[str] = SET_OPTION,
    eigen: Optional[Path] = EIGEN_OPTION,
    log_level: LogLevel = LOG_LEVEL_OPTION,
    verbose: bool = VERBOSE_OPTION,
    quiet: bool = QUIET_OPTION,
):
    """Propagate in the low-energy eigenstate subspace."""
    _execute(Command.EVOLVE_SUBSPACE, config, out, seed, shots, step, settings, log_level, verbose, quiet, eigen)


@app.command("evolve-exact")
def evolve_exact_command(
    config: Optional[str] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    step: Optional[float] = STEP_OPTION,
    settings: List[str] = SET_OPTION,
    eigen: Optional[Path] = EIGEN_OPTION,
    log_level: LogLevel = LOG_LEVEL_OPTION,
    verbose: bool = VERBOSE_OPTION,
    quiet: bool = QUIET_OPTION,
):
    """Exact full-grid reference propagation."""
    _execute(Command.EVOLVE_EXACT, config, out, None, None, step, settings, log_level, verbose, quiet, eigen)


@app.command("spectrum")
def spectrum_command(
    config: Optional[str] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    input_path: Optional[Path] = typer.Option(
        None, "--input", "-i", help="Trajectory CSV with time_fs and dipole columns"
    ),
    step: Optional[float] = STEP_OPTION,
    settings: List[str] = SET_OPTION,
    log_level: LogLevel = LOG_LEVEL_OPTION,
    verbose: bool = VERBOSE_OPTION,
    quiet: bool = QUIET_OPTION,
):
    """Harmonic spectrum of a dipole time series (runs exact propagation when no input is given)."""
    _execute(
        Command.SPECTRUM, config, out, None, None, step, settings, log_level, verbose, quiet, input_path=input_path
    )


@app.command("resources")
def resources_command(
    config: Optional[str] = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    settings: List[str] = SET_OPTION,
    log_level: LogLevel = LOG_LEVEL_OPTION,
    verbose: bool = VERBOSE_OPTION,
    quiet: bool = QUIET_OPTION,
):
    """Estimate measurement circuits per time step for every method."""
    _execute(Command.RESOURCES, config, out, None, None, None, settings, log_level, verbose, quiet)


@app.command("list")
def list_command(
    filter_str: str = typer.Option(
        "",
        "--filter",
        "-f",
        help="Filter results to only show workflows that include the filter string in their name",
    ),
):
    """List available workflows with their model and description."""
    workflows = [
        w for w in WorkflowLoader().list_workflows() if not filter_str or filter_str.lower() in w["name"].lower()
    ]
    if not workflows:
        print_styled("No workflows found!", style="yellow", bold=True)
        return

    table = Table(title="Available Workflows")
    table.add_column("Name", style="green", no_wrap=True)
    table.add_column("Model", style="cyan")
    table.add_column("Description")
    for workflow in workflows:
        description = workflow.get("error") or workflow["description"] or ""
        table.add_row(workflow["name"], str(workflow["model"]), description)
    console.print(table)


@app.command("version")
def version_command(
    dependencies: bool = typer.Option(
        False, "--dependencies/--no-dependencies", help="Also show numerical stack versions"
    ),
):
    """Display the vqdyn version."""
    console.print(f"vqdyn version: {VERSION}", style="green bold")
    if dependencies:
        for name, value in get_dependency_versions().items():
            if name != "vqdyn":
                console.print(f"  {name}: {value}")


def main():
    """Entry point for the CLI."""

    def handle_sigint(signum, frame):
        print_styled("Interrupted. Partial outputs are discarded.", style="yellow", bold=True)
        sys.exit(130)

    signal.signal(signal.SIGINT, handle_sigint)
    app()


if __name__ == "__main__":
    main()
