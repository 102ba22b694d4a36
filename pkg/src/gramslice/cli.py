import traceback
from dataclasses import replace
from pathlib import Path
from typing import Annotated

import numpy as np
import typer
from rich.console import Console
from rich.table import Table

from gramslice import __version__
from gramslice.config import (
    CandidateVariant,
    ScheduleConfig,
    ScheduleMode,
    SchedulerOptions,
    SweepSpec,
    WeightNormalization,
)
from gramslice.config_file import GramsliceConfig, load_config
from gramslice.constants import DEFAULT_SWING_SEED
from gramslice.core.gramian_hankel import gramians, hankel_norm, hankel_spectrum
from gramslice.core.scheduler import build_schedule, normalize_schedule
from gramslice.core.sparsifier import IterationRecord
from gramslice.core.sweep import run_sweep
from gramslice.core.system_model import (
    random_swing_params,
    random_system,
    swing_system,
    validate_minimal,
)
from gramslice.data_files import load_schedule, load_swing_params, load_system
from gramslice.exceptions import GramsliceError, HorizonError, NonMinimalSystemError
from gramslice.input_validators import (
    ValidationError,
    env_enum,
    env_flag,
    env_threads,
    parse_budget_list,
    validate_budget,
    validate_horizon,
    validate_input_file,
    validate_output_directory,
    validate_output_file_mode,
    validate_output_file_path,
    validate_thread_count,
)
from gramslice.logging import get_logger, setup_logging
from gramslice.models import LtiSystem
from gramslice.output.csv_out import write_heatmaps, write_sweep
from gramslice.output.json_out import (
    swing_params_to_dict,
    write_json,
    write_report,
    write_schedule,
    write_system,
    write_trace,
)
from gramslice.utils.fileio import write_text_file_secure
from gramslice.utils.profiling import OperationProfiler
from gramslice.verification import VerificationReport, verify_schedule

logger = get_logger(__name__)

app = typer.Typer(
    name="gramslice",
    help="Certified sparse sensor and actuator schedules for discrete-time linear systems.",
    no_args_is_help=True,
)

console = Console(stderr=True)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_BOUND_VIOLATION = 2

VerboseOption = Annotated[
    bool, typer.Option("--verbose", "-v", help="Debug logging, including every sparsifier step")
]
QuietOption = Annotated[bool, typer.Option("--quiet", "-q", help="Only warnings and errors")]
LogJsonOption = Annotated[
    bool | None,
    typer.Option("--log-json/--no-log-json", help="JSON log lines on stderr [env: GRAMSLICE_LOG_JSON]"),
]
ConfigOption = Annotated[
    Path | None, typer.Option("--config", "-c", help="Path to YAML configuration file")
]
FileModeOption = Annotated[
    str | None, typer.Option("--file-mode", help="Permissions for written files, octal (default 644)")
]


def version_callback(value: bool):
    """Print version and exit."""
    if value:
        print(f"gramslice {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Annotated[
        bool | None,
        typer.Option(
            "--version",
            "-V",
            help="Show version and exit.",
            callback=version_callback,
            is_eager=True,
        ),
    ] = None,
):
    """gramslice - sparse sensor/actuator schedules with certified Gramian bounds."""
    pass


def _start(command: str, verbose: bool, quiet: bool, log_json: bool | None) -> None:
    structured = log_json if log_json is not None else bool(env_flag("GRAMSLICE_LOG_JSON"))
    setup_logging(verbose=verbose, quiet=quiet, structured=structured)
    logger.debug("CLI command invoked", command=command)


def _load_config(path: Path | None) -> GramsliceConfig:
    if path is None:
        return GramsliceConfig()
    return load_config(path)


def _file_mode(cli_value: str | None, config: GramsliceConfig) -> int:
    if cli_value is None:
        return config.output.file_mode
    return validate_output_file_mode(cli_value)


def _resolve_options(
    config: GramsliceConfig,
    variant: CandidateVariant | None,
    normalization: WeightNormalization | None,
) -> SchedulerOptions:
    base = config.scheduler_options()
    resolved_variant = variant or env_enum("GRAMSLICE_VARIANT", CandidateVariant) or base.variant
    return SchedulerOptions(
        variant=resolved_variant,
        normalization=normalization or base.normalization,
        tolerances=base.tolerances,
    )


def _resolve_mode(mode: ScheduleMode | None, config: GramsliceConfig) -> ScheduleMode:
    return mode or env_enum("GRAMSLICE_MODE", ScheduleMode) or config.schedule.mode


def _require_minimal(system: LtiSystem, t: int, options: SchedulerOptions) -> None:
    if t < system.n:
        raise HorizonError(t, system.n, "horizon assumption t >= n")
    verdict = validate_minimal(system, t, options.tolerances)
    if not verdict.is_minimal:
        raise NonMinimalSystemError(
            verdict.rank_reachability, verdict.rank_observability, system.n, t
        )


def _show_report(report: VerificationReport, verbose: bool) -> None:
    if verbose:
        console.print(report.format_report(), highlight=False)
        return
    status = "[green]PASS[/green]" if report.passed else "[red]FAIL[/red]"
    console.print(
        f"{status} eps_s={report.epsilon_sensors:.6g} (<= {report.epsilon_theory_sensors:.6g}), "
        f"eps_a={report.epsilon_actuators:.6g} (<= {report.epsilon_theory_actuators:.6g}), "
        f"eps_hankel={report.epsilon_hankel:.6g} (<= {report.epsilon_theory_joint:.6g})",
        highlight=False,
    )
    console.print(
        f"[dim]{report.sensor_pairs} sensor pairs, {report.actuator_pairs} actuator pairs over "
        f"t={report.t}; Hankel norm {report.hankel_norm:.6g} -> {report.hankel_norm_scheduled:.6g}[/dim]"
    )


def _fail(e: Exception, verbose: bool) -> None:
    """Map an exception to the exit-code contract; always raises typer.Exit."""
    if isinstance(e, ValidationError):
        console.print(f"[red]Validation Error:[/red] {e}")
    elif isinstance(e, NonMinimalSystemError):
        logger.error("System is not minimal", error=str(e))
        console.print(f"[red]Non-minimal system:[/red] {e}")
        console.print("[dim]Both R(t) and O(t) must have rank n; try a longer horizon.[/dim]")
    elif isinstance(e, GramsliceError):
        logger.error("Command failed", error=str(e))
        console.print(f"[red]Error:[/red] {e}")
    elif isinstance(e, ValueError):
        console.print(f"[red]Validation Error:[/red] {e}")
    else:
        logger.critical("Unexpected error occurred", error=str(e), exc_info=True)
        console.print(f"[red]Unexpected error:[/red] {e}")
        if verbose:
            console.print(traceback.format_exc())
    raise typer.Exit(EXIT_INPUT_ERROR)


@app.command()
def schedule(
    system_file: Annotated[Path, typer.Option("--system", "-s", help="System JSON file")],
    horizon: Annotated[int | None, typer.Option("--t", "-t", help="Horizon length t (>= n)")] = None,
    d_s: Annotated[
        float | None, typer.Option("--ds", help="Average active sensors per step")
    ] = None,
    d_a: Annotated[
        float | None, typer.Option("--da", help="Average active actuators per step")
    ] = None,
    mode: Annotated[
        ScheduleMode | None,
        typer.Option("--mode", "-m", help="Synthesis path [env: GRAMSLICE_MODE]", case_sensitive=False),
    ] = None,
    variant: Annotated[
        CandidateVariant | None,
        typer.Option("--variant", help="Joint candidate construction [env: GRAMSLICE_VARIANT]"),
    ] = None,
    normalization: Annotated[
        WeightNormalization | None,
        typer.Option("--normalization", help="Final weight rescaling of the sparsifier"),
    ] = None,
    normalize: Annotated[
        bool | None,
        typer.Option(
            "--normalize/--no-normalize",
            help="Also write a copy rescaled to sum s^2 = n d_s, sum a^2 = n d_a",
        ),
    ] = None,
    out_file: Annotated[
        Path, typer.Option("--out", "-o", help="Schedule JSON output")
    ] = Path("schedule.json"),
    report_file: Annotated[
        Path | None,
        typer.Option("--report", "-r", help="Report JSON output (default: <out>.report.json)"),
    ] = None,
    trace_file: Annotated[
        Path | None, typer.Option("--trace", help="Write sparsifier iterations as JSON lines")
    ] = None,
    config: ConfigOption = None,
    file_mode: FileModeOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    log_json: LogJsonOption = None,
):
    """
    Synthesize a schedule, verify it and write both files.

    Exit code 0 when every certified bound holds, 2 when one is violated,
    1 on invalid input.

    Examples:

        gramslice schedule --system sys.json --t 12 --ds 1 --da 1 --mode joint

        gramslice schedule -s swing.json -t 20 --ds 2.2 --da 2.2 --trace trace.jsonl
    """
    try:
        _start("schedule", verbose, quiet, log_json)
        cfg = _load_config(config)
        resolved_t = horizon if horizon is not None else cfg.schedule.horizon
        if resolved_t is None:
            raise ValidationError("Horizon is required: pass --t or set schedule.horizon")
        settings = ScheduleConfig(
            horizon=validate_horizon(resolved_t),
            d_s=d_s if d_s is not None else cfg.schedule.d_s,
            d_a=d_a if d_a is not None else cfg.schedule.d_a,
            mode=_resolve_mode(mode, cfg),
            normalize=normalize if normalize is not None else cfg.schedule.normalize,
            trace=trace_file is not None,
            options=_resolve_options(cfg, variant, normalization),
        )
        for label, value in (("--ds", settings.d_s), ("--da", settings.d_a)):
            if value is not None:
                validate_budget(value, label)
        mode_file = _file_mode(file_mode, cfg)
        report_path = report_file or out_file.with_name(f"{out_file.stem}.report.json")
        for path in (out_file, report_path, trace_file):
            if path is not None:
                validate_output_file_path(path)

        system = load_system(validate_input_file(system_file))
        t = settings.horizon
        _require_minimal(system, t, settings.options)

        records: list[tuple[str, IterationRecord]] = []
        trace = (lambda side, entry: records.append((side, entry))) if settings.trace else None
        with logger.timed_operation("schedule synthesis", mode=settings.mode.value, n=system.n, t=t):
            result = build_schedule(
                system, t, settings.mode, settings.d_s, settings.d_a, settings.options, trace
            )
        report = verify_schedule(system, result, settings.options)

        write_schedule(result, out_file, mode_file)
        write_report(report, report_path, mode_file)
        console.print(f"[green]Schedule written to[/green] {out_file}")
        console.print(f"[green]Report written to[/green] {report_path}")
        if trace_file is not None:
            count = write_trace(records, trace_file, mode_file)
            console.print(f"[dim]{count} trace records written to {trace_file}[/dim]")

        if settings.normalize:
            budgets = result.budgets
            normalized = normalize_schedule(
                result,
                None if result.is_full("sensors") or budgets is None else budgets.d_s,
                None if result.is_full("actuators") or budgets is None else budgets.d_a,
                system.n,
            )
            normalized_path = out_file.with_name(f"{out_file.stem}.normalized.json")
            write_schedule(normalized, normalized_path, mode_file)
            console.print(f"[dim]Normalized schedule written to {normalized_path}[/dim]")

        _show_report(report, verbose)
        if not report.passed:
            logger.error("Certified bound violated", provenance=report.provenance)
            raise typer.Exit(EXIT_BOUND_VIOLATION)

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, verbose)


@app.command()
def verify(
    schedule_file: Annotated[Path, typer.Argument(help="Schedule JSON file")],
    system_file: Annotated[Path, typer.Option("--system", "-s", help="System JSON file")],
    report_file: Annotated[
        Path | None, typer.Option("--report", "-r", help="Write the report JSON here")
    ] = None,
    config: ConfigOption = None,
    file_mode: FileModeOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    log_json: LogJsonOption = None,
):
    """
    Re-verify a schedule file against its system.

    Exit code 0 when every certified bound holds, 2 otherwise.
    """
    try:
        _start("verify", verbose, quiet, log_json)
        cfg = _load_config(config)
        options = cfg.scheduler_options()
        mode_file = _file_mode(file_mode, cfg)
        if report_file is not None:
            validate_output_file_path(report_file)

        system = load_system(validate_input_file(system_file))
        loaded = load_schedule(validate_input_file(schedule_file))
        report = verify_schedule(system, loaded, options)
        if report_file is not None:
            write_report(report, report_file, mode_file)
            console.print(f"[green]Report written to[/green] {report_file}")

        _show_report(report, verbose)
        if not report.passed:
            raise typer.Exit(EXIT_BOUND_VIOLATION)

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, verbose)


@app.command()
def sweep(
    system_file: Annotated[
        Path | None,
        typer.Option("--system", "-s", help="System JSON file (default: seeded swing demo)"),
    ] = None,
    horizon: Annotated[int | None, typer.Option("--t", "-t", help="Horizon length t")] = None,
    sensor_budgets: Annotated[
        str | None, typer.Option("--ds", help="Comma-separated d_s values, e.g. 2,4,8")
    ] = None,
    actuator_budgets: Annotated[
        str | None, typer.Option("--da", help="Comma-separated d_a values")
    ] = None,
    mode: Annotated[
        ScheduleMode | None,
        typer.Option("--mode", "-m", help="Synthesis path [env: GRAMSLICE_MODE]"),
    ] = None,
    variant: Annotated[
        CandidateVariant | None,
        typer.Option("--variant", help="Joint candidate construction [env: GRAMSLICE_VARIANT]"),
    ] = None,
    normalization: Annotated[
        WeightNormalization | None,
        typer.Option("--normalization", help="Final weight rescaling of the sparsifier"),
    ] = None,
    normalize: Annotated[
        bool, typer.Option("--normalize", help="Also write normalized_epsilon_grid.csv")
    ] = False,
    out_dir: Annotated[
        Path | None, typer.Option("--out-dir", "-o", help="Directory for the CSV grids")
    ] = None,
    threads: Annotated[
        int | None, typer.Option("--threads", help="Worker threads [env: GRAMSLICE_THREADS]")
    ] = None,
    generators: Annotated[
        int, typer.Option("--generators", "-g", help="Swing demo size when --system is absent")
    ] = 10,
    seed: Annotated[
        int, typer.Option("--seed", help="Seed of the swing demo parameters")
    ] = DEFAULT_SWING_SEED,
    profile: Annotated[
        bool, typer.Option("--profile", help="Print per-cell timings after the sweep")
    ] = False,
    config: ConfigOption = None,
    file_mode: FileModeOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    log_json: LogJsonOption = None,
):
    """
    Run a (d_s, d_a) grid and write one CSV per quantity.

    Rows are d_s values plus a fully sensed row, columns d_a values plus a
    fully actuated column. Infeasible cells are written as "skip:<reason>".

    Examples:

        gramslice sweep --t 20 --ds 2,4,8 --da 2,4,8 -o sweep/

        GRAMSLICE_THREADS=4 gramslice sweep -s sys.json -t 24 --ds 1,2 --da 1,2 --mode separation
    """
    try:
        _start("sweep", verbose, quiet, log_json)
        cfg = _load_config(config)
        resolved_t = horizon if horizon is not None else cfg.schedule.horizon
        if resolved_t is None:
            raise ValidationError("Horizon is required: pass --t or set schedule.horizon")
        d_s_values = (
            parse_budget_list(sensor_budgets, "d_s")
            if sensor_budgets is not None
            else cfg.sweep.sensor_budgets
        )
        d_a_values = (
            parse_budget_list(actuator_budgets, "d_a")
            if actuator_budgets is not None
            else cfg.sweep.actuator_budgets
        )
        if not d_s_values or not d_a_values:
            raise ValidationError("Both --ds and --da lists are required (or sweep budgets in the config)")
        resolved_threads = threads if threads is not None else env_threads()
        resolved_threads = validate_thread_count(
            resolved_threads if resolved_threads is not None else cfg.sweep.threads
        )
        output_dir = validate_output_directory(
            out_dir or Path(cfg.output.directory or "sweep")
        )

        spec = SweepSpec(
            system_path=system_file,
            horizon=validate_horizon(resolved_t),
            sensor_budgets=d_s_values,
            actuator_budgets=d_a_values,
            mode=_resolve_mode(mode, cfg),
            normalize=normalize,
            output_dir=output_dir,
            seed=None if system_file is not None else seed,
            threads=resolved_threads,
            options=_resolve_options(cfg, variant, normalization),
        )
        mode_file = _file_mode(file_mode, cfg)

        if system_file is not None:
            system = load_system(validate_input_file(system_file))
        else:
            system = swing_system(random_swing_params(generators, seed=seed))
            console.print(
                f"[dim]Using swing demo: g={generators}, seed={seed} (n={system.n}, m={system.m}, p={system.p})[/dim]"
            )
        _require_minimal(system, spec.horizon, spec.options)

        profiler = OperationProfiler() if (profile or cfg.sweep.profile) else None
        with console.status("[bold blue]Running sweep...[/bold blue]"):
            result = run_sweep(system, spec, profiler)
        written = write_sweep(result, output_dir, mode_file)

        console.print(f"[green]Wrote {len(written)} files to[/green] {output_dir}")
        if result.skipped:
            console.print(f"[yellow]{len(result.skipped)} cell(s) skipped[/yellow]")
        if profiler is not None:
            console.print(profiler.get_summary().format_summary(), highlight=False)
        if result.violations:
            for cell in result.violations:
                console.print(
                    f"[red]Bound violated at d_s={cell.d_s:g}, d_a={cell.d_a:g}:[/red] "
                    f"eps={cell.epsilon:.6g} > {cell.epsilon_theory:.6g}"
                )
            raise typer.Exit(EXIT_BOUND_VIOLATION)

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, verbose)


@app.command()
def heatmap(
    schedule_file: Annotated[Path, typer.Argument(help="Schedule JSON file")],
    out_dir: Annotated[Path, typer.Option("--out-dir", "-o", help="Output directory")] = Path("."),
    stem: Annotated[
        str | None, typer.Option("--stem", help="File name prefix (default: schedule file stem)")
    ] = None,
    system_file: Annotated[
        Path | None, typer.Option("--system", "-s", help="System file, used only for channel labels")
    ] = None,
    file_mode: FileModeOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    log_json: LogJsonOption = None,
):
    """
    Write dense matrices of squared scalings: <stem>_sensors.csv (p x t)
    and <stem>_actuators.csv (m x t).
    """
    try:
        _start("heatmap", verbose, quiet, log_json)
        mode_file = _file_mode(file_mode, GramsliceConfig())
        loaded = load_schedule(validate_input_file(schedule_file))
        validate_output_directory(out_dir)

        sensor_labels: tuple[str, ...] = ()
        actuator_labels: tuple[str, ...] = ()
        if system_file is not None:
            system = load_system(validate_input_file(system_file))
            sensor_labels, actuator_labels = system.output_labels, system.input_labels

        paths = write_heatmaps(
            loaded,
            out_dir,
            stem or schedule_file.stem,
            sensor_labels=sensor_labels,
            actuator_labels=actuator_labels,
            file_mode=mode_file,
        )
        for path in paths:
            console.print(f"[green]Wrote[/green] {path}")

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, verbose)


@app.command()
def swing(
    params_file: Annotated[
        Path | None, typer.Argument(help="Swing parameter JSON (default: seeded demo parameters)")
    ] = None,
    out_file: Annotated[Path, typer.Option("--out", "-o", help="System JSON output")] = Path(
        "swing.json"
    ),
    generators: Annotated[
        int, typer.Option("--generators", "-g", help="Generator count for the seeded demo")
    ] = 10,
    seed: Annotated[int, typer.Option("--seed", help="Seed for the demo parameters")] = DEFAULT_SWING_SEED,
    dt: Annotated[float | None, typer.Option("--dt", help="Sampling interval in seconds")] = None,
    params_out: Annotated[
        Path | None, typer.Option("--params-out", help="Also save the parameters used")
    ] = None,
    file_mode: FileModeOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    log_json: LogJsonOption = None,
):
    """
    Discretize a swing-equation network (zero-order hold) into a system file.

    The result has n = 2g states, m = g inputs and p = 2g outputs.
    """
    try:
        _start("swing", verbose, quiet, log_json)
        mode_file = _file_mode(file_mode, GramsliceConfig())
        validate_output_file_path(out_file)
        if params_file is not None:
            params = load_swing_params(validate_input_file(params_file))
            if dt is not None:
                params = replace(params, dt=dt)
        else:
            kwargs = {"dt": dt} if dt is not None else {}
            params = random_swing_params(generators, seed=seed, **kwargs)

        system = swing_system(params)
        write_system(system, out_file, mode_file)
        if params_out is not None:
            write_json(swing_params_to_dict(params), params_out, mode_file)
        console.print(
            f"[green]System written to[/green] {out_file} "
            f"(n={system.n}, m={system.m}, p={system.p}, h={params.dt:g}s)"
        )

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, verbose)


@app.command("random-system")
def random_system_command(
    n: Annotated[int, typer.Option("--n", help="State dimension", min=1)],
    m: Annotated[int, typer.Option("--m", help="Input count", min=1)],
    p: Annotated[int, typer.Option("--p", help="Output count", min=1)],
    seed: Annotated[int, typer.Option("--seed", help="Generator seed")] = 0,
    spectral_radius: Annotated[
        float, typer.Option("--spectral-radius", help="Spectral radius of A")
    ] = 0.9,
    out_file: Annotated[Path, typer.Option("--out", "-o", help="System JSON output")] = Path(
        "system.json"
    ),
    file_mode: FileModeOption = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    log_json: LogJsonOption = None,
):
    """Write a seeded random system (standard normal entries)."""
    try:
        _start("random-system", verbose, quiet, log_json)
        mode_file = _file_mode(file_mode, GramsliceConfig())
        validate_output_file_path(out_file)
        system = random_system(n, m, p, seed, spectral_radius=spectral_radius)
        write_system(system, out_file, mode_file)
        console.print(f"[green]System written to[/green] {out_file} (n={n}, m={m}, p={p}, seed={seed})")

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, verbose)


@app.command()
def inspect(
    system_file: Annotated[Path, typer.Argument(help="System JSON file")],
    horizon: Annotated[
        int | None, typer.Option("--t", "-t", help="Horizon length (default: n)")
    ] = None,
    verbose: VerboseOption = False,
    quiet: QuietOption = False,
    log_json: LogJsonOption = None,
):
    """Show dimensions, minimality ranks, Gramian conditioning and Hankel singular values."""
    try:
        _start("inspect", verbose, quiet, log_json)
        system = load_system(validate_input_file(system_file))
        t = validate_horizon(horizon if horizon is not None else system.n)
        verdict = validate_minimal(system, t)

        console.print(f"[bold]System:[/bold] n={system.n}, m={system.m}, p={system.p}, t={t}")
        rank_style = "green" if verdict.is_minimal else "red"
        console.print(
            f"[{rank_style}]rank R(t)={verdict.rank_reachability}, "
            f"rank O(t)={verdict.rank_observability}[/{rank_style}]"
            + ("" if verdict.is_minimal else "  (not minimal)")
        )
        radius = float(np.max(np.abs(np.linalg.eigvals(system.A))))
        console.print(f"Spectral radius of A: {radius:.6g}")

        g = gramians(system, t)
        table = Table(title="Gramians")
        table.add_column("Gramian")
        table.add_column("lambda_min", justify="right")
        table.add_column("lambda_max", justify="right")
        table.add_column("condition", justify="right")
        for name, matrix in (("P (controllability)", g.P), ("Q (observability)", g.Q)):
            eigenvalues = np.linalg.eigvalsh(matrix)
            lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
            condition = lam_max / lam_min if lam_min > 0 else float("inf")
            table.add_row(name, f"{lam_min:.4e}", f"{lam_max:.4e}", f"{condition:.3e}")
        console.print(table)

        spectrum = hankel_spectrum(g)
        console.print(f"Hankel norm: {hankel_norm(spectrum):.6g}")
        values = ", ".join(f"{v:.4g}" for v in spectrum.values)
        console.print(f"Hankel singular values: {values}", highlight=False)

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, verbose)


@app.command()
def init(
    out_file: Annotated[
        Path, typer.Option("--out-file", "-f", help="Output config file path")
    ] = Path("gramslice.yaml"),
    horizon: Annotated[int | None, typer.Option("--t", "-t", help="Default horizon")] = None,
    force: Annotated[bool, typer.Option("--force", help="Overwrite an existing file")] = False,
):
    """
    Write a commented configuration template.

    Examples:

        gramslice init

        gramslice init -f configs/swing.yaml --t 20
    """
    try:
        validate_output_file_path(out_file)
        if out_file.exists() and not force:
            raise ValidationError(f"{out_file} already exists (use --force to overwrite)")
        cfg = GramsliceConfig()
        if horizon is not None:
            cfg.schedule.horizon = validate_horizon(horizon)
        write_text_file_secure(out_file, cfg.to_yaml(include_comments=True), file_mode=cfg.output.file_mode)

        console.print(f"[green]Configuration written to [bold]{out_file}[/bold][/green]")
        console.print("[bold]Next steps:[/bold]")
        console.print(f"  1. Review and edit [cyan]{out_file}[/cyan]")
        console.print(
            f"  2. Run: [cyan]gramslice schedule --config {out_file} --system sys.json --ds 2 --da 2[/cyan]"
        )

    except (typer.Exit, SystemExit):
        raise
    except Exception as e:
        _fail(e, False)
