"""Loading of system, swing-parameter and schedule JSON files."""

import json
from pathlib import Path
from typing import Any

import numpy as np

from gramslice.exceptions import GramsliceError, SystemFileError
from gramslice.logging import get_logger
from gramslice.models import LtiSystem, Provenance, Schedule, ScheduleBudgets, SchedulePairs, SwingParams

logger = get_logger(__name__)


def _read_json(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise SystemFileError(str(path), "File does not exist")
    if not path.is_file():
        raise SystemFileError(str(path), "Path is not a file")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise SystemFileError(str(path), f"Invalid JSON: {e}")
    except OSError as e:
        raise SystemFileError(str(path), f"Cannot read file: {e}")
    if not isinstance(data, dict):
        raise SystemFileError(str(path), "Top level must be a JSON object")
    return data


def _require(data: dict[str, Any], key: str) -> Any:
    if key not in data:
        raise ValueError(f"missing required key '{key}'")
    return data[key]


def _row_major(data: dict[str, Any], key: str, rows: int, cols: int) -> np.ndarray:
    values = np.asarray(_require(data, key), dtype=float)
    if values.ndim == 2 and values.shape == (rows, cols):
        return values
    if values.size != rows * cols:
        raise ValueError(f"'{key}' has {values.size} entries, expected {rows}x{cols} = {rows * cols}")
    return values.reshape(rows, cols)


def _positive_int(data: dict[str, Any], key: str) -> int:
    value = _require(data, key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError(f"'{key}' must be a positive integer, got {value!r}")
    return value


def system_from_dict(data: dict[str, Any]) -> LtiSystem:
    n, m, p = (_positive_int(data, key) for key in ("n", "m", "p"))
    labels = data.get("labels") or {}
    if not isinstance(labels, dict):
        raise ValueError("'labels' must be an object with 'inputs' and 'outputs'")
    return LtiSystem(
        A=_row_major(data, "A", n, n),
        B=_row_major(data, "B", n, m),
        C=_row_major(data, "C", p, n),
        input_labels=tuple(str(label) for label in labels.get("inputs", ())),
        output_labels=tuple(str(label) for label in labels.get("outputs", ())),
    )


def swing_params_from_dict(data: dict[str, Any]) -> SwingParams:
    inertia = np.asarray(_require(data, "inertia"), dtype=float).reshape(-1)
    g = inertia.size
    return SwingParams(
        inertia=inertia,
        damping=np.asarray(_require(data, "damping"), dtype=float).reshape(-1),
        coupling=_row_major(data, "coupling", g, g),
        dt=float(_require(data, "dt")),
    )


def _pairs_from_list(entries: Any, what: str) -> SchedulePairs:
    if not isinstance(entries, list):
        raise ValueError(f"'{what}' must be a list of {{k, i, scale}} objects")
    pairs: SchedulePairs = {}
    for entry in entries:
        if not isinstance(entry, dict):
            raise ValueError(f"'{what}' entries must be objects")
        key = (int(_require(entry, "k")), int(_require(entry, "i")))
        if key in pairs:
            raise ValueError(f"duplicate {what} entry at k={key[0]}, i={key[1]}")
        pairs[key] = float(_require(entry, "scale"))
    return pairs


def schedule_from_dict(data: dict[str, Any]) -> Schedule:
    budgets = None
    if data.get("budgets") is not None:
        raw = data["budgets"]
        budgets = ScheduleBudgets(
            d_s=raw.get("d_s"),
            d_a=raw.get("d_a"),
            kappa_s=raw.get("kappa_s"),
            kappa_a=raw.get("kappa_a"),
            normalization=raw.get("normalization", "proof"),
        )
    return Schedule(
        t=_positive_int(data, "t"),
        m=_positive_int(data, "m"),
        p=_positive_int(data, "p"),
        actuators=_pairs_from_list(data.get("actuators", []), "actuators"),
        sensors=_pairs_from_list(data.get("sensors", []), "sensors"),
        provenance=Provenance(data.get("provenance", Provenance.JOINT.value)),
        budgets=budgets,
    )


def _load(path: str | Path, parse, what: str):
    data = _read_json(path)
    try:
        loaded = parse(data)
    except SystemFileError:
        raise
    except (GramsliceError, ValueError, TypeError, KeyError) as e:
        raise SystemFileError(str(path), f"Invalid {what}: {e}")
    logger.debug("Loaded file", path=str(path), kind=what)
    return loaded


def load_system(path: str | Path) -> LtiSystem:
    return _load(path, system_from_dict, "system")


def load_swing_params(path: str | Path) -> SwingParams:
    return _load(path, swing_params_from_dict, "swing parameters")


def load_schedule(path: str | Path) -> Schedule:
    return _load(path, schedule_from_dict, "schedule")
