import json
import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from gramslice.constants import DEFAULT_OUTPUT_FILE_MODE
from gramslice.core.sparsifier import IterationRecord
from gramslice.models import LtiSystem, Schedule, SchedulePairs, SwingParams
from gramslice.utils.fileio import write_lines_secure, write_text_file_secure
from gramslice.verification import VerificationReport


class NumericEncoder(json.JSONEncoder):
    """
    JSON encoder for numpy scalars and arrays, enums and paths.

    Non-finite floats never reach the encoder as numbers: ``sanitize``
    replaces them with the strings "inf", "-inf" and "nan" first.
    """

    def default(self, obj: Any) -> Any:
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, Path):
            return str(obj)
        return super().default(obj)


def sanitize(value: Any) -> Any:
    """Recursively mark infinite values explicitly so the output stays strict JSON."""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {key: sanitize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(item) for item in value]
    if isinstance(value, np.ndarray):
        return sanitize(value.tolist())
    return value


def dumps(data: Any, pretty: bool = True) -> str:
    text = json.dumps(
        sanitize(data),
        cls=NumericEncoder,
        indent=2 if pretty else None,
        ensure_ascii=False,
        allow_nan=False,
    )
    return text + "\n" if pretty else text


def system_to_dict(system: LtiSystem) -> dict[str, Any]:
    """System file layout: dimensions, row-major A, B, C and optional labels."""
    data: dict[str, Any] = {
        "n": system.n,
        "m": system.m,
        "p": system.p,
        "A": system.A.ravel().tolist(),
        "B": system.B.ravel().tolist(),
        "C": system.C.ravel().tolist(),
    }
    if system.input_labels or system.output_labels:
        data["labels"] = {
            "inputs": list(system.input_labels),
            "outputs": list(system.output_labels),
        }
    return data


def swing_params_to_dict(params: SwingParams) -> dict[str, Any]:
    return {
        "inertia": params.inertia.tolist(),
        "damping": params.damping.tolist(),
        "coupling": params.coupling.ravel().tolist(),
        "dt": params.dt,
    }


def _pairs_to_list(pairs: SchedulePairs) -> list[dict[str, Any]]:
    return [{"k": k, "i": i, "scale": scale} for (k, i), scale in sorted(pairs.items())]


def schedule_to_dict(schedule: Schedule) -> dict[str, Any]:
    """Schedule file layout; pairs sorted by (k, i) so diffs stay readable."""
    data: dict[str, Any] = {
        "t": schedule.t,
        "m": schedule.m,
        "p": schedule.p,
        "actuators": _pairs_to_list(schedule.actuators),
        "sensors": _pairs_to_list(schedule.sensors),
        "provenance": schedule.provenance.value,
    }
    if schedule.budgets is not None:
        budgets = schedule.budgets
        data["budgets"] = {
            "d_s": budgets.d_s,
            "d_a": budgets.d_a,
            "kappa_s": budgets.kappa_s,
            "kappa_a": budgets.kappa_a,
            "normalization": budgets.normalization,
        }
    return data


def report_to_dict(report: VerificationReport) -> dict[str, Any]:
    return report.to_dict()


def trace_lines(records: list[tuple[str, IterationRecord]]) -> list[str]:
    """One compact JSON object per sparsifier step, tagged with its side."""
    return [dumps({"side": side, **record.to_dict()}, pretty=False) for side, record in records]


def write_json(
    data: dict[str, Any], path: str | Path, file_mode: int = DEFAULT_OUTPUT_FILE_MODE
) -> None:
    write_text_file_secure(path, dumps(data), file_mode=file_mode)


def write_system(
    system: LtiSystem, path: str | Path, file_mode: int = DEFAULT_OUTPUT_FILE_MODE
) -> None:
    write_json(system_to_dict(system), path, file_mode)


def write_schedule(
    schedule: Schedule, path: str | Path, file_mode: int = DEFAULT_OUTPUT_FILE_MODE
) -> None:
    write_json(schedule_to_dict(schedule), path, file_mode)


def write_report(
    report: VerificationReport, path: str | Path, file_mode: int = DEFAULT_OUTPUT_FILE_MODE
) -> None:
    write_json(report_to_dict(report), path, file_mode)


def write_trace(
    records: list[tuple[str, IterationRecord]],
    path: str | Path,
    file_mode: int = DEFAULT_OUTPUT_FILE_MODE,
) -> int:
    return write_lines_secure(path, trace_lines(records), file_mode)
