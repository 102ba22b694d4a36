import csv
import io
import math
from collections.abc import Callable
from pathlib import Path

import numpy as np

from gramslice.config import ScheduleMode
from gramslice.constants import CSV_SIGNIFICANT_DIGITS, DEFAULT_OUTPUT_FILE_MODE
from gramslice.core.sweep import SweepCell, SweepResult
from gramslice.models import Schedule
from gramslice.utils.fileio import write_text_file_secure

CellValue = Callable[[SweepCell], str]

GRID_FILES = {
    "epsilon": "epsilon_grid.csv",
    "theory": "theory_grid.csv",
    "hankel_norm": "hankel_norm_grid.csv",
    "log_error": "log_error_grid.csv",
    "normalized_epsilon": "normalized_epsilon_grid.csv",
}
CELLS_FILE = "cells.csv"


def format_number(value: float | None) -> str:
    """Six significant digits; infinities spelled out, missing values empty."""
    if value is None:
        return ""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"


def _write_rows(rows: list[list[str]]) -> str:
    output = io.StringIO()
    writer = csv.writer(output, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerows(rows)
    return output.getvalue()


def _skip(cell: SweepCell) -> str:
    return f"skip:{cell.skip_reason}"


def _epsilon_value(cell: SweepCell) -> str:
    if cell.report is None:
        return _skip(cell)
    if cell.mode is ScheduleMode.SEPARATION:
        report = cell.report
        return (
            f"{format_number(cell.epsilon)} "
            f"({format_number(report.epsilon_sensors)}+{format_number(report.epsilon_actuators)})"
        )
    return format_number(cell.epsilon)


def _theory_value(cell: SweepCell) -> str:
    return _skip(cell) if cell.report is None else format_number(cell.epsilon_theory)


def _hankel_norm_value(cell: SweepCell) -> str:
    return _skip(cell) if cell.report is None else format_number(cell.report.hankel_norm_scheduled)


def _log_error_value(cell: SweepCell) -> str:
    return _skip(cell) if cell.report is None else format_number(cell.report.hankel_log_error)


def _normalized_value(cell: SweepCell) -> str:
    return _skip(cell) if cell.report is None else format_number(cell.normalized_epsilon)


_GRID_VALUES: dict[str, CellValue] = {
    "epsilon": _epsilon_value,
    "theory": _theory_value,
    "hankel_norm": _hankel_norm_value,
    "log_error": _log_error_value,
    "normalized_epsilon": _normalized_value,
}


def grid_csv(result: SweepResult, quantity: str) -> str:
    """
    Rows indexed by d_s, columns by d_a, the last row and column being the
    fully sensed and fully actuated margins.

        d_s \\ d_a,2,4,8,full
        2,1.23,...
    """
    value = _GRID_VALUES[quantity]
    rows = [["d_s \\ d_a", *result.col_labels]]
    for label, cells in zip(result.row_labels, result.cells):
        rows.append([label, *(value(cell) for cell in cells)])
    return _write_rows(rows)


_CELL_COLUMNS = [
    "d_s",
    "d_a",
    "mode",
    "status",
    "sensor_pairs",
    "actuator_pairs",
    "kappa_s",
    "kappa_a",
    "epsilon_theory_sensors",
    "epsilon_theory_actuators",
    "epsilon_theory_joint",
    "epsilon_sensors",
    "epsilon_actuators",
    "epsilon_hankel",
    "epsilon_joint",
    "hankel_norm",
    "hankel_norm_scheduled",
    "hankel_log_error",
    "normalized_epsilon",
]


def cells_csv(result: SweepResult) -> str:
    """One row per grid cell with every reported quantity."""
    rows = [list(_CELL_COLUMNS)]
    for r_label, cells in zip(result.row_labels, result.cells):
        for c_label, cell in zip(result.col_labels, cells):
            report = cell.report
            if report is None:
                rows.append([r_label, c_label, cell.mode.value, _skip(cell)] + [""] * (len(_CELL_COLUMNS) - 4))
                continue
            rows.append(
                [
                    r_label,
                    c_label,
                    cell.mode.value,
                    "pass" if report.passed else "fail",
                    str(report.sensor_pairs),
                    str(report.actuator_pairs),
                    "" if report.kappa_s is None else str(report.kappa_s),
                    "" if report.kappa_a is None else str(report.kappa_a),
                    format_number(report.epsilon_theory_sensors),
                    format_number(report.epsilon_theory_actuators),
                    format_number(report.epsilon_theory_joint),
                    format_number(report.epsilon_sensors),
                    format_number(report.epsilon_actuators),
                    format_number(report.epsilon_hankel),
                    format_number(report.epsilon_joint),
                    format_number(report.hankel_norm),
                    format_number(report.hankel_norm_scheduled),
                    format_number(report.hankel_log_error),
                    format_number(cell.normalized_epsilon),
                ]
            )
    return _write_rows(rows)


def write_sweep(
    result: SweepResult,
    output_dir: str | Path,
    file_mode: int = DEFAULT_OUTPUT_FILE_MODE,
) -> list[Path]:
    """Write every grid plus cells.csv; returns the paths in write order."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    quantities = ["epsilon", "theory", "hankel_norm", "log_error"]
    if result.spec.normalize:
        quantities.append("normalized_epsilon")

    written = []
    for quantity in quantities:
        path = output_dir / GRID_FILES[quantity]
        write_text_file_secure(path, grid_csv(result, quantity), file_mode=file_mode)
        written.append(path)
    path = output_dir / CELLS_FILE
    write_text_file_secure(path, cells_csv(result), file_mode=file_mode)
    written.append(path)
    return written


def heatmap_matrices(schedule: Schedule) -> tuple[np.ndarray, np.ndarray]:
    """Dense (p x t) sensor and (m x t) actuator matrices of squared scalings."""
    sensors = np.zeros((schedule.p, schedule.t))
    actuators = np.zeros((schedule.m, schedule.t))
    for (k, i), scale in schedule.sensors.items():
        sensors[i, k] = scale * scale
    for (k, i), scale in schedule.actuators.items():
        actuators[i, k] = scale * scale
    return sensors, actuators


def heatmap_csv(matrix: np.ndarray, labels: tuple[str, ...] = ()) -> str:
    """Channel per row, time step per column; zeros written explicitly."""
    channels, t = matrix.shape
    rows = [["channel", *(f"k={k}" for k in range(t))]]
    for i in range(channels):
        name = labels[i] if i < len(labels) else str(i)
        rows.append([name, *(format_number(float(v)) for v in matrix[i])])
    return _write_rows(rows)


def write_heatmaps(
    schedule: Schedule,
    output_dir: str | Path,
    stem: str = "schedule",
    sensor_labels: tuple[str, ...] = (),
    actuator_labels: tuple[str, ...] = (),
    file_mode: int = DEFAULT_OUTPUT_FILE_MODE,
) -> tuple[Path, Path]:
    output_dir = Path(output_dir)
    sensors, actuators = heatmap_matrices(schedule)
    sensor_path = output_dir / f"{stem}_sensors.csv"
    actuator_path = output_dir / f"{stem}_actuators.csv"
    write_text_file_secure(sensor_path, heatmap_csv(sensors, sensor_labels), file_mode=file_mode)
    write_text_file_secure(actuator_path, heatmap_csv(actuators, actuator_labels), file_mode=file_mode)
    return sensor_path, actuator_path
