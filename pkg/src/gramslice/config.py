from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from gramslice.constants import (
    BOUND_ATOL,
    DEFAULT_MEMORY_BUDGET_ENTRIES,
    DEFAULT_THREADS,
    INVERSE_SQRT_MIN_RATIO,
    ISOTROPY_RTOL,
    PSD_RTOL,
    RANK_RTOL,
    SCALE_FLOOR,
    SELECTION_RTOL,
)


class ScheduleMode(Enum):
    """Which schedule synthesis path to run."""

    JOINT = "joint"
    SEPARATION = "separation"
    SENSOR = "sensor"
    ACTUATOR = "actuator"
    FULL = "full"


class CandidateVariant(Enum):
    """How the joint scheduler builds its two candidate families."""

    PROOF = "proof"  # actuator columns Q A^i b_j, whitened; sensor columns Q^{-1/2} (c_j A^i)^T
    LISTING = "listing"  # sensor columns P^{1/2} (c_j A^i)^T, whitened; actuator columns P^{-1/2} A^i b_j


class WeightNormalization(Enum):
    """Final rescaling of sparsifier weights."""

    PROOF = "proof"  # 1 / (kappa (1 + x)): symmetric e^{±eps} sandwich
    LISTING = "listing"  # (1 - x) / kappa: [(1 - x)^2, (1 + x)^2] sandwich


class MetricId(Enum):
    """Built-in systemic performance metrics."""

    SQUARED_HANKEL_NORM = "squared-hankel-norm"
    TRACE = "trace"


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every module."""

    rank_rtol: float = RANK_RTOL
    """Relative threshold for numerical rank."""

    psd_rtol: float = PSD_RTOL
    """Negative eigenvalues above -psd_rtol * lambda_max are clamped."""

    inverse_sqrt_min_ratio: float = INVERSE_SQRT_MIN_RATIO
    """Minimum lambda_min / lambda_max for inverse square roots and whitening."""

    isotropy_rtol: float = ISOTROPY_RTOL
    """Frobenius tolerance for the sum-to-identity check on candidate families."""

    selection_rtol: float = SELECTION_RTOL
    """Slack on U <= L when selecting a sparsifier index."""

    bound_atol: float = BOUND_ATOL
    """Absolute slack on epsilon bound checks."""

    scale_floor: float = SCALE_FLOOR
    """Scalings at or below this value count as zero."""

    memory_budget_entries: int = DEFAULT_MEMORY_BUDGET_ENTRIES
    """Largest block matrix, in float entries, that may be assembled."""


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class SchedulerOptions:
    """Knobs of the schedule synthesis, all defaulting to the certified path."""

    variant: CandidateVariant = CandidateVariant.PROOF
    normalization: WeightNormalization = WeightNormalization.PROOF
    tolerances: Tolerances = DEFAULT_TOLERANCES


@dataclass
class SweepSpec:
    """
    A (d_s, d_a) grid run over one system.

    Rows are indexed by sensor budgets and columns by actuator budgets; a
    fully-sensed row and a fully-actuated column are appended as margins.
    """

    system_path: Path | None
    horizon: int
    sensor_budgets: list[float]
    actuator_budgets: list[float]
    mode: ScheduleMode = ScheduleMode.JOINT
    normalize: bool = False
    output_dir: Path = field(default_factory=lambda: Path("sweep"))
    seed: int | None = None
    threads: int = DEFAULT_THREADS
    options: SchedulerOptions = field(default_factory=SchedulerOptions)

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"Horizon must be positive, got {self.horizon}")
        for label, values in (("d_s", self.sensor_budgets), ("d_a", self.actuator_budgets)):
            if not values:
                raise ValueError(f"At least one {label} value is required")
            if any(v <= 0 for v in values):
                raise ValueError(f"All {label} values must be positive")
        if self.threads < 1:
            raise ValueError(f"Thread count must be >= 1, got {self.threads}")


@dataclass
class ScheduleConfig:
    """Everything a single ``schedule`` run needs besides the system itself."""

    horizon: int
    d_s: float | None = None
    d_a: float | None = None
    mode: ScheduleMode = ScheduleMode.JOINT
    normalize: bool = False
    trace: bool = False
    options: SchedulerOptions = field(default_factory=SchedulerOptions)

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError(f"Horizon must be positive, got {self.horizon}")
        for label, value in (("d_s", self.d_s), ("d_a", self.d_a)):
            if value is not None and value <= 0:
                raise ValueError(f"{label} must be positive, got {value}")
