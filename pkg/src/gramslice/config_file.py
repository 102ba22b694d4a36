"""YAML configuration file: numerics, schedule, sweep and output sections.

Values here are the lowest-precedence layer; environment variables and CLI
flags override them.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from gramslice.config import (
    CandidateVariant,
    ScheduleMode,
    SchedulerOptions,
    Tolerances,
    WeightNormalization,
)
from gramslice.constants import DEFAULT_OUTPUT_FILE_MODE, DEFAULT_THREADS
from gramslice.exceptions import GramsliceError
from gramslice.logging import get_logger
from gramslice.utils.fileio import parse_file_mode

logger = get_logger(__name__)

_TOP_LEVEL_KEYS = {"version", "numerics", "schedule", "sweep", "output"}
_NUMERICS_KEYS = {
    "rank_rtol",
    "psd_rtol",
    "inverse_sqrt_min_ratio",
    "isotropy_rtol",
    "selection_rtol",
    "bound_atol",
    "scale_floor",
    "memory_budget_entries",
}
_SCHEDULE_KEYS = {"horizon", "d_s", "d_a", "mode", "variant", "normalization", "normalize"}
_SWEEP_KEYS = {"sensor_budgets", "actuator_budgets", "threads", "profile"}
_OUTPUT_KEYS = {"file_mode", "directory"}

__all__ = [
    "ConfigFileError",
    "GramsliceConfig",
    "NumericsConfig",
    "OutputConfig",
    "ScheduleSection",
    "SweepSection",
    "load_config",
]


class ConfigFileError(GramsliceError):
    """Error loading or parsing configuration file."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Failed to load config from '{path}': {reason}")


def _validate_unknown_keys(section_name: str, data: dict[str, Any], allowed: set[str]) -> None:
    unknown = sorted(set(data.keys()) - allowed)
    if unknown:
        raise ValueError(
            f"Unknown key(s) in '{section_name}': {', '.join(unknown)}. "
            "Remove unsupported fields or update your config."
        )


def _section(data: dict[str, Any], name: str, allowed: set[str]) -> dict[str, Any]:
    section = data.get(name) or {}
    if not isinstance(section, dict):
        raise ValueError(f"'{name}' must be a mapping")
    _validate_unknown_keys(name, section, allowed)
    return section


def _budget_list(value: Any, name: str) -> list[float]:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ValueError(f"'{name}' must be a list of numbers")
    budgets = [float(v) for v in value]
    if any(v <= 0 for v in budgets):
        raise ValueError(f"'{name}' values must be positive")
    return budgets


@dataclass
class NumericsConfig:
    """Overrides for the numerical tolerances."""

    rank_rtol: float = Tolerances.rank_rtol
    psd_rtol: float = Tolerances.psd_rtol
    inverse_sqrt_min_ratio: float = Tolerances.inverse_sqrt_min_ratio
    isotropy_rtol: float = Tolerances.isotropy_rtol
    selection_rtol: float = Tolerances.selection_rtol
    bound_atol: float = Tolerances.bound_atol
    scale_floor: float = Tolerances.scale_floor
    memory_budget_entries: int = Tolerances.memory_budget_entries

    def to_tolerances(self) -> Tolerances:
        return Tolerances(
            rank_rtol=self.rank_rtol,
            psd_rtol=self.psd_rtol,
            inverse_sqrt_min_ratio=self.inverse_sqrt_min_ratio,
            isotropy_rtol=self.isotropy_rtol,
            selection_rtol=self.selection_rtol,
            bound_atol=self.bound_atol,
            scale_floor=self.scale_floor,
            memory_budget_entries=self.memory_budget_entries,
        )


@dataclass
class ScheduleSection:
    """Defaults for ``gramslice schedule``."""

    horizon: int | None = None
    """Horizon t; must be at least the state dimension."""

    d_s: float | None = None
    """Average active sensors per step."""

    d_a: float | None = None
    """Average active actuators per step."""

    mode: ScheduleMode = ScheduleMode.JOINT
    variant: CandidateVariant = CandidateVariant.PROOF
    normalization: WeightNormalization = WeightNormalization.PROOF

    normalize: bool = False
    """Also write a copy rescaled to sum s^2 = n d_s, sum a^2 = n d_a."""


@dataclass
class SweepSection:
    """Defaults for ``gramslice sweep``."""

    sensor_budgets: list[float] = field(default_factory=list)
    actuator_budgets: list[float] = field(default_factory=list)
    threads: int = DEFAULT_THREADS
    profile: bool = False


@dataclass
class OutputConfig:
    """Output file settings."""

    file_mode: int = DEFAULT_OUTPUT_FILE_MODE
    """Permissions mode for output files (octal)."""

    directory: str | None = None
    """Default sweep output directory."""


@dataclass
class GramsliceConfig:
    """
    Complete gramslice configuration loaded from YAML.

    CLI arguments and GRAMSLICE_* environment variables take precedence.
    """

    version: str | None = None
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    schedule: ScheduleSection = field(default_factory=ScheduleSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def from_yaml(cls, path: str | Path) -> "GramsliceConfig":
        """
        Load configuration from a YAML file.

        Raises:
            ConfigFileError: If the file cannot be read, parsed or validated
        """
        path = Path(path)
        if not path.exists():
            raise ConfigFileError(str(path), "File does not exist")
        if not path.is_file():
            raise ConfigFileError(str(path), "Path is not a file")

        try:
            with open(path, encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigFileError(str(path), f"Invalid YAML: {e}")
        except OSError as e:
            raise ConfigFileError(str(path), f"Cannot read file: {e}")

        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigFileError(str(path), "Config file must contain a YAML mapping (dictionary)")

        logger.info("Loaded config file", path=str(path))
        try:
            return cls._from_dict(data)
        except (ValueError, TypeError) as e:
            raise ConfigFileError(str(path), f"Invalid configuration: {e}")

    @classmethod
    def _from_dict(cls, data: dict[str, Any]) -> "GramsliceConfig":
        _validate_unknown_keys("root", data, _TOP_LEVEL_KEYS)

        numerics_data = _section(data, "numerics", _NUMERICS_KEYS)
        numerics = NumericsConfig(
            **{
                key: (int(value) if key == "memory_budget_entries" else float(value))
                for key, value in numerics_data.items()
            }
        )
        for key, value in numerics_data.items():
            if float(value) <= 0:
                raise ValueError(f"numerics.{key} must be positive")

        schedule_data = _section(data, "schedule", _SCHEDULE_KEYS)
        horizon = schedule_data.get("horizon")
        if horizon is not None and (isinstance(horizon, bool) or int(horizon) < 1):
            raise ValueError("schedule.horizon must be a positive integer")
        schedule = ScheduleSection(
            horizon=int(horizon) if horizon is not None else None,
            d_s=float(schedule_data["d_s"]) if schedule_data.get("d_s") is not None else None,
            d_a=float(schedule_data["d_a"]) if schedule_data.get("d_a") is not None else None,
            mode=ScheduleMode(schedule_data.get("mode", ScheduleMode.JOINT.value)),
            variant=CandidateVariant(schedule_data.get("variant", CandidateVariant.PROOF.value)),
            normalization=WeightNormalization(
                schedule_data.get("normalization", WeightNormalization.PROOF.value)
            ),
            normalize=bool(schedule_data.get("normalize", False)),
        )
        for label, value in (("d_s", schedule.d_s), ("d_a", schedule.d_a)):
            if value is not None and value <= 0:
                raise ValueError(f"schedule.{label} must be positive")

        sweep_data = _section(data, "sweep", _SWEEP_KEYS)
        threads = int(sweep_data.get("threads", DEFAULT_THREADS))
        if threads < 1:
            raise ValueError("sweep.threads must be at least 1")
        sweep = SweepSection(
            sensor_budgets=_budget_list(sweep_data.get("sensor_budgets"), "sweep.sensor_budgets"),
            actuator_budgets=_budget_list(sweep_data.get("actuator_budgets"), "sweep.actuator_budgets"),
            threads=threads,
            profile=bool(sweep_data.get("profile", False)),
        )

        output_data = _section(data, "output", _OUTPUT_KEYS)
        output = OutputConfig(
            file_mode=parse_file_mode(output_data.get("file_mode", DEFAULT_OUTPUT_FILE_MODE)),
            directory=output_data.get("directory"),
        )

        version = data.get("version")
        return cls(
            version=str(version) if version is not None else None,
            numerics=numerics,
            schedule=schedule,
            sweep=sweep,
            output=output,
        )

    def scheduler_options(self) -> SchedulerOptions:
        return SchedulerOptions(
            variant=self.schedule.variant,
            normalization=self.schedule.normalization,
            tolerances=self.numerics.to_tolerances(),
        )

    def to_yaml(self, include_comments: bool = True) -> str:
        """Render the configuration; with comments it doubles as the ``init`` template."""

        def comment(text: str) -> None:
            if include_comments:
                output.append(text)

        def optional(key: str, value: Any, example: str) -> None:
            if value is not None:
                output.append(f"  {key}: {value}")
            elif include_comments:
                output.append(f"  # {key}: {example}")

        def budgets(values: list[float]) -> str:
            return "[" + ", ".join(f"{v:g}" for v in values) + "]"

        output: list[str] = []
        comment("# gramslice configuration file")
        comment("# Precedence: this file < GRAMSLICE_* environment variables < CLI flags")
        comment("")
        if self.version:
            output.append(f'version: "{self.version}"')
            output.append("")

        comment("# Numerical tolerances")
        output.append("numerics:")
        for key in sorted(_NUMERICS_KEYS):
            value = getattr(self.numerics, key)
            output.append(f"  {key}: {value if isinstance(value, int) else repr(float(value))}")
        output.append("")

        comment("# Schedule synthesis")
        output.append("schedule:")
        optional("horizon", self.schedule.horizon, "20  # must be >= n")
        optional("d_s", self.schedule.d_s, "2.2  # average active sensors per step")
        optional("d_a", self.schedule.d_a, "2.2  # average active actuators per step")
        output.append(f"  mode: {self.schedule.mode.value}  # joint, separation, sensor, actuator, full")
        output.append(f"  variant: {self.schedule.variant.value}  # proof or listing")
        output.append(f"  normalization: {self.schedule.normalization.value}  # proof or listing")
        output.append(f"  normalize: {str(self.schedule.normalize).lower()}")
        output.append("")

        comment("# Budget sweeps")
        output.append("sweep:")
        if self.sweep.sensor_budgets:
            output.append(f"  sensor_budgets: {budgets(self.sweep.sensor_budgets)}")
        elif include_comments:
            output.append("  # sensor_budgets: [2, 4, 8]")
        if self.sweep.actuator_budgets:
            output.append(f"  actuator_budgets: {budgets(self.sweep.actuator_budgets)}")
        elif include_comments:
            output.append("  # actuator_budgets: [2, 4, 8]")
        output.append(f"  threads: {self.sweep.threads}")
        output.append(f"  profile: {str(self.sweep.profile).lower()}")
        output.append("")

        comment("# Output files")
        output.append("output:")
        output.append(f'  file_mode: "{self.output.file_mode:o}"')
        optional("directory", self.output.directory, "sweep")
        return "\n".join(output) + "\n"


def load_config(path: str | Path) -> GramsliceConfig:
    """
    Load configuration from a YAML file.

    Raises:
        ConfigFileError: If file cannot be read or parsed
    """
    return GramsliceConfig.from_yaml(path)
