"""
(d_s, d_a) budget sweeps over one system.

Rows are the requested sensor budgets plus a fully sensed margin (d_s = p),
columns the requested actuator budgets plus a fully actuated margin (d_a = m).
Cells are independent and may be computed on a thread pool; results are
assembled in grid order, so the output does not depend on the thread count.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from gramslice.config import ScheduleMode, SweepSpec
from gramslice.core.scheduler import build_schedule
from gramslice.exceptions import GramsliceError
from gramslice.logging import get_logger
from gramslice.models import LtiSystem
from gramslice.utils.profiling import OperationProfiler
from gramslice.verification import VerificationReport, verify_schedule

logger = get_logger(__name__)

FULL_LABEL = "full"

# Budgets a mode actually consumes; the other one is ignored (and deduplicated).
_USES_SENSOR_BUDGET = {ScheduleMode.JOINT, ScheduleMode.SEPARATION, ScheduleMode.SENSOR}
_USES_ACTUATOR_BUDGET = {ScheduleMode.JOINT, ScheduleMode.SEPARATION, ScheduleMode.ACTUATOR}

_CellKey = tuple[float | None, float | None]


@dataclass(frozen=True)
class SweepCell:
    """One (d_s, d_a) grid cell: a verification report or a skip reason."""

    row: int
    col: int
    d_s: float
    d_a: float
    mode: ScheduleMode
    report: VerificationReport | None = None
    skip_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.report is None

    @property
    def epsilon(self) -> float:
        """The empirical factor the mode certifies: one side, or the Hankel spectrum for joint modes."""
        report = self._require_report()
        if self.mode is ScheduleMode.SENSOR:
            return report.epsilon_sensors
        if self.mode is ScheduleMode.ACTUATOR:
            return report.epsilon_actuators
        return report.epsilon_hankel

    @property
    def epsilon_theory(self) -> float:
        report = self._require_report()
        if self.mode is ScheduleMode.SENSOR:
            return report.epsilon_theory_sensors
        if self.mode is ScheduleMode.ACTUATOR:
            return report.epsilon_theory_actuators
        return report.epsilon_theory_joint

    @property
    def normalized_epsilon(self) -> float | None:
        report = self._require_report()
        if report.normalized is None:
            return None
        if self.mode is ScheduleMode.SENSOR:
            return report.normalized.epsilon_sensors
        if self.mode is ScheduleMode.ACTUATOR:
            return report.normalized.epsilon_actuators
        return report.normalized.epsilon_hankel

    def _require_report(self) -> VerificationReport:
        if self.report is None:
            raise ValueError(f"Cell ({self.row}, {self.col}) was skipped: {self.skip_reason}")
        return self.report


@dataclass(frozen=True)
class SweepResult:
    """Grid of cells, row-major, with the labels used for the CSV margins."""

    spec: SweepSpec
    n: int
    m: int
    p: int
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[SweepCell, ...], ...]

    def iter_cells(self):
        for row in self.cells:
            yield from row

    @property
    def violations(self) -> list[SweepCell]:
        """Computed cells whose certified bounds failed."""
        return [cell for cell in self.iter_cells() if cell.report is not None and not cell.report.passed]

    @property
    def skipped(self) -> list[SweepCell]:
        return [cell for cell in self.iter_cells() if cell.skipped]


def _label(value: float) -> str:
    return f"{value:g}"


def budget_axes(spec: SweepSpec, system: LtiSystem) -> tuple[list[tuple[str, float]], list[tuple[str, float]]]:
    """Row and column (label, budget) lists including the full margins."""
    rows = [(_label(d), d) for d in spec.sensor_budgets] + [(FULL_LABEL, float(system.p))]
    cols = [(_label(d), d) for d in spec.actuator_budgets] + [(FULL_LABEL, float(system.m))]
    return rows, cols


def _cell_key(mode: ScheduleMode, d_s: float, d_a: float) -> _CellKey:
    return (
        d_s if mode in _USES_SENSOR_BUDGET else None,
        d_a if mode in _USES_ACTUATOR_BUDGET else None,
    )


def _infeasible(d: float | None, channels: int, t: int, n: int, label: str) -> str | None:
    if d is None or d >= channels:
        return None
    kappa = math.floor(d * t)
    if kappa <= n:
        return f"{label}*t={d * t:g} gives kappa={kappa} <= n={n}"
    return None


def _run_cell(
    system: LtiSystem,
    spec: SweepSpec,
    key: _CellKey,
    profiler: OperationProfiler | None,
) -> tuple[VerificationReport | None, str | None]:
    d_s, d_a = key
    t = spec.horizon
    reason = _infeasible(d_s, system.p, t, system.n, "d_s") or _infeasible(
        d_a, system.m, t, system.n, "d_a"
    )
    if reason is not None:
        logger.info("Skipping sweep cell", d_s=d_s, d_a=d_a, reason=reason)
        return None, reason

    name = f"d_s={_label(d_s) if d_s is not None else '-'}, d_a={_label(d_a) if d_a is not None else '-'}"
    start = time.perf_counter()
    try:
        if profiler is not None:
            with profiler.track(name, category=spec.mode.value):
                schedule = build_schedule(system, t, spec.mode, d_s, d_a, spec.options)
                report = verify_schedule(system, schedule, spec.options)
        else:
            schedule = build_schedule(system, t, spec.mode, d_s, d_a, spec.options)
            report = verify_schedule(system, schedule, spec.options)
    except GramsliceError as e:
        reason = " ".join(str(e).split())
        logger.warning("Sweep cell failed", cell=name, error=reason)
        return None, reason
    except (np.linalg.LinAlgError, ValueError) as e:
        reason = f"{type(e).__name__}: {' '.join(str(e).split())}"
        logger.warning("Sweep cell failed", cell=name, error=reason)
        return None, reason

    logger.debug(
        "Sweep cell complete",
        cell=name,
        epsilon_hankel=report.epsilon_hankel,
        passed=report.passed,
        duration_ms=int((time.perf_counter() - start) * 1000),
    )
    return report, None


def run_sweep(
    system: LtiSystem,
    spec: SweepSpec,
    profiler: OperationProfiler | None = None,
) -> SweepResult:
    """
    Compute every cell of the grid.

    Cells that share the budgets a mode consumes (for example every column
    of a sensor-only sweep) are computed once. Infeasible budgets and
    algorithm failures become skip records; the sweep always completes.
    """
    rows, cols = budget_axes(spec, system)
    keys: list[_CellKey] = []
    for _, d_s in rows:
        for _, d_a in cols:
            key = _cell_key(spec.mode, d_s, d_a)
            if key not in keys:
                keys.append(key)

    logger.info(
        "Starting sweep",
        mode=spec.mode.value,
        rows=len(rows),
        cols=len(cols),
        distinct_cells=len(keys),
        threads=spec.threads,
    )
    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            futures = {key: pool.submit(_run_cell, system, spec, key, profiler) for key in keys}
            outcomes = {key: future.result() for key, future in futures.items()}
    else:
        outcomes = {key: _run_cell(system, spec, key, profiler) for key in keys}

    grid: list[tuple[SweepCell, ...]] = []
    for r, (_, d_s) in enumerate(rows):
        row_cells = []
        for c, (_, d_a) in enumerate(cols):
            report, reason = outcomes[_cell_key(spec.mode, d_s, d_a)]
            row_cells.append(
                SweepCell(
                    row=r,
                    col=c,
                    d_s=d_s,
                    d_a=d_a,
                    mode=spec.mode,
                    report=report,
                    skip_reason=reason,
                )
            )
        grid.append(tuple(row_cells))

    result = SweepResult(
        spec=spec,
        n=system.n,
        m=system.m,
        p=system.p,
        row_labels=tuple(label for label, _ in rows),
        col_labels=tuple(label for label, _ in cols),
        cells=tuple(grid),
    )
    logger.info(
        "Sweep complete",
        cells=len(rows) * len(cols),
        skipped=len(result.skipped),
        violations=len(result.violations),
    )
    return result
