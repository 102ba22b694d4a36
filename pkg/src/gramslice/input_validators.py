"""Validation of CLI arguments and environment variables.

Catches malformed budgets, horizons, paths, thread counts and enum values
before any matrix is built. Numerical failures inside the algorithms are
reported through gramslice.exceptions instead.
"""

import math
import os
from collections.abc import Mapping
from enum import Enum
from os import W_OK, access
from pathlib import Path
from typing import TypeVar

from gramslice.utils.fileio import parse_file_mode

E = TypeVar("E", bound=Enum)

_TRUE_VALUES = {"1", "true", "yes", "on"}
_FALSE_VALUES = {"0", "false", "no", "off", ""}

_SYSTEM_DIRECTORIES = ("/bin", "/sbin", "/usr/bin", "/usr/sbin", "/etc", "/private/etc", "/sys", "/proc")


class ValidationError(Exception):
    """Base exception for validation errors."""

    pass


class BudgetValidationError(ValidationError):
    """Invalid average sparsity budget (d_s or d_a)."""

    def __init__(self, value: str, reason: str):
        self.value = value
        self.reason = reason
        super().__init__(f"Invalid budget '{value}': {reason}")


class HorizonValidationError(ValidationError):
    """Invalid horizon length."""

    def __init__(self, horizon: int, reason: str):
        self.horizon = horizon
        self.reason = reason
        super().__init__(f"Invalid horizon {horizon}: {reason}")


class FilePathValidationError(ValidationError):
    """Invalid input or output path."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Invalid file path '{path}': {reason}")


class EnvironmentValidationError(ValidationError):
    """Environment variable holds a value that cannot be used."""

    def __init__(self, variable: str, value: str, reason: str):
        self.variable = variable
        self.value = value
        self.reason = reason
        super().__init__(f"Invalid value '{value}' for {variable}: {reason}")


def validate_budget(value: float, label: str = "budget") -> float:
    if not math.isfinite(value) or value <= 0:
        raise BudgetValidationError(str(value), f"{label} must be a finite positive number")
    return float(value)


def parse_budget_list(text: str, label: str = "budget") -> list[float]:
    """
    Parse "2,4,8" (or "2 4 8") into [2.0, 4.0, 8.0].

    Examples:
        >>> parse_budget_list("2.2, 4")
        [2.2, 4.0]
    """
    items = [item for item in text.replace(",", " ").split() if item]
    if not items:
        raise BudgetValidationError(text, f"at least one {label} value is required")
    values: list[float] = []
    for item in items:
        try:
            value = float(item)
        except ValueError:
            raise BudgetValidationError(item, f"{label} values must be numbers")
        values.append(validate_budget(value, label))
    if len(set(values)) != len(values):
        raise BudgetValidationError(text, f"duplicate {label} values")
    return values


def validate_horizon(horizon: int) -> int:
    if horizon < 1:
        raise HorizonValidationError(horizon, "horizon must be at least 1")
    return horizon


def validate_input_file(path: str | Path) -> Path:
    path = Path(path)
    if not path.exists():
        raise FilePathValidationError(str(path), "File does not exist")
    if not path.is_file():
        raise FilePathValidationError(str(path), "Path is not a file")
    return path


def _inside_system_directory(path: Path) -> Path | None:
    resolved = path.resolve()
    for directory in _SYSTEM_DIRECTORIES:
        system_dir = Path(directory).resolve()
        if resolved == system_dir or system_dir in resolved.parents:
            return system_dir
    return None


def validate_output_file_path(path: str | Path) -> None:
    """
    An output file must live in an existing, writable, non-system directory.

    Raises:
        FilePathValidationError: If the path cannot be written
    """
    if not str(path):
        raise FilePathValidationError(str(path), "File path cannot be empty")
    path = Path(path)
    parent = path.parent
    if parent != Path(".") and not parent.exists():
        raise FilePathValidationError(str(path), f"Parent directory does not exist: {parent}")
    try:
        forbidden = _inside_system_directory(path)
    except (OSError, RuntimeError) as e:
        raise FilePathValidationError(str(path), f"Invalid path: {e}")
    if forbidden is not None:
        raise FilePathValidationError(str(path), f"Cannot write to system directory: {forbidden}")
    if path.exists() and path.is_dir():
        raise FilePathValidationError(str(path), "Path is a directory")
    if not access(parent, W_OK):
        raise FilePathValidationError(str(path), f"Parent directory is not writable: {parent}")


def validate_output_directory(path: str | Path) -> Path:
    """Sweep output directory: created if missing, must be writable otherwise."""
    path = Path(path)
    if path.exists() and not path.is_dir():
        raise FilePathValidationError(str(path), "Output path exists and is not a directory")
    try:
        forbidden = _inside_system_directory(path)
    except (OSError, RuntimeError) as e:
        raise FilePathValidationError(str(path), f"Invalid path: {e}")
    if forbidden is not None:
        raise FilePathValidationError(str(path), f"Cannot write to system directory: {forbidden}")
    if path.exists() and not access(path, W_OK):
        raise FilePathValidationError(str(path), "Output directory is not writable")
    return path


def validate_output_file_mode(mode: str | int | None) -> int:
    if mode is None:
        raise ValidationError("File mode cannot be None")
    try:
        return parse_file_mode(mode)
    except ValueError as e:
        raise ValidationError(str(e))


def validate_thread_count(value: int, source: str = "--threads") -> int:
    if value < 1:
        raise ValidationError(f"{source} must be at least 1, got {value}")
    return value


def env_threads(environ: Mapping[str, str] | None = None) -> int | None:
    """GRAMSLICE_THREADS as a positive integer, or None when unset."""
    environ = os.environ if environ is None else environ
    raw = environ.get("GRAMSLICE_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw.strip())
    except ValueError:
        raise EnvironmentValidationError("GRAMSLICE_THREADS", raw, "must be an integer")
    if value < 1:
        raise EnvironmentValidationError("GRAMSLICE_THREADS", raw, "must be at least 1")
    return value


def env_enum(variable: str, enum_type: type[E], environ: Mapping[str, str] | None = None) -> E | None:
    environ = os.environ if environ is None else environ
    raw = environ.get(variable)
    if raw is None or raw.strip() == "":
        return None
    try:
        return enum_type(raw.strip().lower())
    except ValueError:
        choices = ", ".join(member.value for member in enum_type)
        raise EnvironmentValidationError(variable, raw, f"expected one of: {choices}")


def env_flag(variable: str, environ: Mapping[str, str] | None = None) -> bool | None:
    environ = os.environ if environ is None else environ
    raw = environ.get(variable)
    if raw is None:
        return None
    normalized = raw.strip().lower()
    if normalized in _TRUE_VALUES:
        return True
    if normalized in _FALSE_VALUES:
        return False
    raise EnvironmentValidationError(variable, raw, "expected a boolean such as 1/0 or true/false")
