import threading
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any


@dataclass
class OperationStats:
    """Wall time of one profiled operation (a sweep cell, a schedule pass, ...)."""

    name: str
    duration_ms: float
    category: str | None = None
    iterations: int = 0
    detail: dict[str, Any] = field(default_factory=dict)

    def __str__(self) -> str:
        category = f" [{self.category}]" if self.category else ""
        iterations = f", {self.iterations} iterations" if self.iterations else ""
        return f"{self.duration_ms:.2f}ms{category} - {self.name}{iterations}"


class OperationProfiler:
    """
    Collects wall-clock timings from (possibly concurrent) operations.

    Usage:
        profiler = OperationProfiler()

        with profiler.track("d_s=2, d_a=4", category="joint") as tracker:
            schedule = joint_schedule(system, t, 2, 4)
            tracker.record_iterations(40)

        print(profiler.get_summary().format_summary())
    """

    def __init__(self, enabled: bool = True):
        self.operations: list[OperationStats] = []
        self.enabled = enabled
        self._lock = threading.Lock()

    def track(self, name: str, category: str | None = None, **detail: Any) -> "OperationTracker":
        return OperationTracker(self, name, category, detail)

    def record(self, stats: OperationStats) -> None:
        if not self.enabled:
            return
        with self._lock:
            self.operations.append(stats)

    def get_summary(self) -> "ProfileSummary":
        with self._lock:
            return ProfileSummary(list(self.operations))

    def reset(self) -> None:
        with self._lock:
            self.operations.clear()


class OperationTracker:
    """Context manager timing a single operation."""

    def __init__(
        self,
        profiler: OperationProfiler,
        name: str,
        category: str | None,
        detail: dict[str, Any],
    ):
        self.profiler = profiler
        self.name = name
        self.category = category
        self.detail = detail
        self.iterations = 0
        self._start = 0.0

    def __enter__(self) -> "OperationTracker":
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        duration_ms = (time.perf_counter() - self._start) * 1000
        detail = dict(self.detail)
        if exc_type is not None:
            detail["failed"] = exc_type.__name__
        self.profiler.record(
            OperationStats(
                name=self.name,
                duration_ms=duration_ms,
                category=self.category,
                iterations=self.iterations,
                detail=detail,
            )
        )
        return False

    def record_iterations(self, count: int) -> None:
        self.iterations = count


@dataclass
class ProfileSummary:
    """Aggregates over every tracked operation."""

    operations: list[OperationStats]

    def __post_init__(self):
        self.total_operations = len(self.operations)
        self.total_duration_ms = sum(op.duration_ms for op in self.operations)
        self.avg_duration_ms = (
            self.total_duration_ms / self.total_operations if self.total_operations else 0.0
        )
        self._by_category: dict[str, list[OperationStats]] = defaultdict(list)
        for op in self.operations:
            self._by_category[op.category or "uncategorized"].append(op)

    def get_slowest(self, n: int = 10) -> list[OperationStats]:
        return sorted(self.operations, key=lambda op: op.duration_ms, reverse=True)[:n]

    def get_category_stats(self) -> dict[str, dict[str, Any]]:
        stats = {}
        for category, ops in self._by_category.items():
            total = sum(op.duration_ms for op in ops)
            stats[category] = {
                "count": len(ops),
                "total_duration_ms": total,
                "avg_duration_ms": total / len(ops),
                "failed": sum(1 for op in ops if "failed" in op.detail),
            }
        return stats

    def format_summary(self, show_slowest: int = 5) -> str:
        lines = ["=" * 80, "SWEEP PERFORMANCE PROFILE", "=" * 80, ""]

        lines.append("Overall Statistics:")
        lines.append(f"  Operations:      {self.total_operations}")
        lines.append(f"  Total duration:  {self.total_duration_ms:.2f} ms")
        lines.append(f"  Avg duration:    {self.avg_duration_ms:.2f} ms")
        lines.append("")

        if self._by_category:
            lines.append("By Category:")
            for category, stats in sorted(
                self.get_category_stats().items(),
                key=lambda item: item[1]["total_duration_ms"],
                reverse=True,
            ):
                lines.append(
                    f"  {category:25s} {stats['count']:4d} runs  "
                    f"{stats['total_duration_ms']:10.2f} ms  "
                    f"{stats['failed']:3d} failed"
                )
            lines.append("")

        if show_slowest > 0 and self.operations:
            lines.append(f"Top {show_slowest} Slowest Operations:")
            for rank, op in enumerate(self.get_slowest(show_slowest), 1):
                lines.append(f"  {rank}. {op}")
            lines.append("")

        lines.append("=" * 80)
        return "\n".join(lines)
