import json
from typing import Any

__all__ = [
    "GramsliceError",
    "DimensionMismatchError",
    "NonFiniteError",
    "HorizonError",
    "MemoryBudgetError",
    "NotPositiveDefiniteError",
    "NearSingularGramianError",
    "NonMinimalSystemError",
    "BarrierViolationError",
    "SingularResolventError",
    "SparsifierBreakdownError",
    "IsotropyError",
    "BudgetError",
    "ScheduleError",
    "MetricError",
    "DiscretizationError",
    "SystemFileError",
]


class GramsliceError(Exception):
    """Base exception for all gramslice errors."""

    pass


class DimensionMismatchError(GramsliceError):
    """A matrix or schedule does not have the shape its system requires."""

    def __init__(self, what: str, expected: Any, actual: Any):
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {actual}")


class NonFiniteError(GramsliceError):
    """A matrix contains NaN or infinite entries."""

    def __init__(self, what: str):
        self.what = what
        super().__init__(f"{what} contains NaN or infinite entries")


class HorizonError(GramsliceError):
    """Horizon is too short for the requested operation."""

    def __init__(self, horizon: int, n: int, reason: str):
        self.horizon = horizon
        self.n = n
        self.reason = reason
        super().__init__(f"Invalid horizon t={horizon} for n={n}: {reason}")


class MemoryBudgetError(GramsliceError):
    """Assembling a block matrix would exceed the configured memory budget."""

    def __init__(self, what: str, rows: int, cols: int, budget: int):
        self.what = what
        self.rows = rows
        self.cols = cols
        self.budget = budget
        super().__init__(
            f"{what} would need {rows}x{cols} = {rows * cols} entries, "
            f"above the memory budget of {budget}"
        )


class NotPositiveDefiniteError(GramsliceError):
    """A matrix declared PSD has an eigenvalue below the rounding tolerance."""

    def __init__(self, what: str, lambda_min: float, lambda_max: float):
        self.what = what
        self.lambda_min = lambda_min
        self.lambda_max = lambda_max
        super().__init__(
            f"{what} is not positive semidefinite: "
            f"lambda_min={lambda_min:.3e}, lambda_max={lambda_max:.3e}"
        )


class NearSingularGramianError(GramsliceError):
    """Loss of minimality: a Gramian is too ill-conditioned to invert."""

    def __init__(self, what: str, ratio: float, threshold: float):
        self.what = what
        self.ratio = ratio
        self.threshold = threshold
        super().__init__(
            f"Loss of minimality / near-singular Gramian in {what}: "
            f"lambda_min/lambda_max={ratio:.3e} is below {threshold:.1e}"
        )


class NonMinimalSystemError(GramsliceError):
    """System is not a minimal realization over the horizon."""

    def __init__(self, rank_reachability: int, rank_observability: int, n: int, horizon: int):
        self.rank_reachability = rank_reachability
        self.rank_observability = rank_observability
        self.n = n
        self.horizon = horizon
        super().__init__(
            f"System is not minimal at t={horizon}: rank R(t)={rank_reachability}, "
            f"rank O(t)={rank_observability}, n={n}"
        )


class BarrierViolationError(GramsliceError):
    """A barrier potential was evaluated with an eigenvalue on the wrong side."""

    def __init__(self, which: str, barrier: float, eigenvalue: float):
        self.which = which
        self.barrier = barrier
        self.eigenvalue = eigenvalue
        side = "below" if which == "lower" else "above"
        super().__init__(
            f"{which.capitalize()} barrier {barrier:.6g} is not strictly {side} "
            f"the extreme eigenvalue {eigenvalue:.6g}"
        )


class SingularResolventError(GramsliceError):
    """Gain evaluation hit a singular resolvent or a zero potential difference."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Cannot evaluate sparsifier gain: {reason}")


class SparsifierBreakdownError(GramsliceError):
    """No admissible index at some iteration; carries the loop state for debugging."""

    def __init__(self, iteration: int, reason: str, state_dump: dict[str, Any]):
        self.iteration = iteration
        self.reason = reason
        self.state_dump = state_dump
        dump = json.dumps(state_dump, default=_dump_default, sort_keys=True)
        super().__init__(f"Sparsifier broke down at iteration {iteration}: {reason}. State: {dump}")


class IsotropyError(GramsliceError):
    """Candidate vectors do not sum (as rank-one terms) to the identity."""

    def __init__(self, deviation: float, tolerance: float):
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            f"Candidate family is not isotropic: relative deviation {deviation:.3e} "
            f"exceeds {tolerance:.1e}"
        )


class BudgetError(GramsliceError):
    """Sparsifier budget is outside n < kappa <= candidate count."""

    def __init__(self, kappa: int, n: int, limit: int, side: str = "sparsifier"):
        self.kappa = kappa
        self.n = n
        self.limit = limit
        self.side = side
        super().__init__(
            f"Invalid {side} budget kappa={kappa}: requires {n} < kappa <= {limit}"
        )


class ScheduleError(GramsliceError):
    """Schedule is malformed or cannot be transformed as requested."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Invalid schedule: {reason}")


class MetricError(GramsliceError):
    """Systemic metric is unknown, non-positive, or fails its sanity checks."""

    def __init__(self, metric: str, reason: str):
        self.metric = metric
        self.reason = reason
        super().__init__(f"Metric '{metric}': {reason}")


class DiscretizationError(GramsliceError):
    """Matrix exponential overflowed during discretization."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Discretization failed: {reason}")


class SystemFileError(GramsliceError):
    """System, swing-parameter or schedule file could not be loaded."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"Failed to load '{path}': {reason}")


def _dump_default(obj: Any) -> Any:
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return str(obj)
