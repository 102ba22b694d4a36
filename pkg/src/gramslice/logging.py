"""
Structured logging for gramslice.

Logs always go to stderr; stdout carries CSV or JSON payloads when a command
is asked to print instead of writing a file. Two formatters are available:
a human-readable one for terminals and a JSON-lines one for log collectors.
"""

import json
import logging
import sys
import time
from contextlib import contextmanager
from typing import Any

_loggers: dict[str, logging.Logger] = {}


class StructuredFormatter(logging.Formatter):
    """
    JSON formatter, one object per record.

    Fields: timestamp, level, logger, message, and when present
    context and exception.
    """

    def format(self, record: logging.LogRecord) -> str:
        log_data: dict[str, Any] = {
            "timestamp": self.formatTime(record, self.datefmt),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        context = getattr(record, "context", None)
        if context:
            log_data["context"] = context

        return json.dumps(log_data, default=str)


class HumanReadableFormatter(logging.Formatter):
    """[TIMESTAMP] LEVEL: message (key=value, ...)"""

    def format(self, record: logging.LogRecord) -> str:
        timestamp = self.formatTime(record, self.datefmt)
        message = record.getMessage()

        context_str = ""
        context = getattr(record, "context", None)
        if context:
            context_parts = [f"{k}={_short(v)}" for k, v in context.items()]
            context_str = f" ({', '.join(context_parts)})"

        exc_str = ""
        if record.exc_info:
            exc_str = "\n" + self.formatException(record.exc_info)

        return f"[{timestamp}] {record.levelname}: {message}{context_str}{exc_str}"


def _short(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def setup_logging(
    verbose: bool = False,
    quiet: bool = False,
    structured: bool = False,
) -> None:
    """
    Configure the gramslice logger hierarchy.

    Args:
        verbose: DEBUG and above, including per-iteration sparsifier records
        quiet: WARNING and above only
        structured: JSON lines instead of the human-readable format
    """
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = logging.INFO

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(level)

    formatter: logging.Formatter
    if structured:
        formatter = StructuredFormatter(datefmt="%Y-%m-%d %H:%M:%S")
    else:
        formatter = HumanReadableFormatter(datefmt="%Y-%m-%d %H:%M:%S")
    handler.setFormatter(formatter)

    root_logger = logging.getLogger("gramslice")
    root_logger.setLevel(logging.DEBUG)
    root_logger.handlers.clear()
    root_logger.addHandler(handler)
    root_logger.propagate = False


def get_logger(name: str) -> "ContextLogger":
    """
    Get or create a logger for a module.

    Args:
        name: Logger name (typically __name__ of the calling module)
    """
    if name not in _loggers:
        qualified = name if name.startswith("gramslice") else f"gramslice.{name}"
        _loggers[name] = logging.getLogger(qualified)

    return ContextLogger(_loggers[name])


class ContextLogger:
    """
    Logger wrapper that attaches keyword context to every record.

    Example:
        logger = get_logger(__name__)
        side_logger = logger.with_context(side="sensors")
        side_logger.info("Sparsifier pass complete", kappa=24)
    """

    def __init__(self, logger: logging.Logger):
        self._logger = logger
        self._context: dict[str, Any] = {}

    def _log(
        self, level: int, msg: str, context: dict[str, Any] | None = None, exc_info: Any = None
    ) -> None:
        merged_context = {**self._context}
        if context:
            merged_context.update(context)

        extra = {"context": merged_context} if merged_context else {}
        self._logger.log(level, msg, extra=extra, exc_info=exc_info)

    def is_enabled_for(self, level: int) -> bool:
        return self._logger.isEnabledFor(level)

    def debug(self, msg: str, **context: Any) -> None:
        self._log(logging.DEBUG, msg, context)

    def info(self, msg: str, **context: Any) -> None:
        self._log(logging.INFO, msg, context)

    def warning(self, msg: str, **context: Any) -> None:
        self._log(logging.WARNING, msg, context)

    def error(self, msg: str, exc_info: Any = None, **context: Any) -> None:
        self._log(logging.ERROR, msg, context, exc_info=exc_info)

    def critical(self, msg: str, exc_info: Any = None, **context: Any) -> None:
        self._log(logging.CRITICAL, msg, context, exc_info=exc_info)

    def with_context(self, **context: Any) -> "ContextLogger":
        """Return a logger that adds ``context`` to every record."""
        new_logger = ContextLogger(self._logger)
        new_logger._context = {**self._context, **context}
        return new_logger

    @contextmanager
    def timed_operation(self, operation: str, **context: Any):
        """
        Log start (DEBUG) and completion (INFO, with duration_ms) of a block.

        Example:
            with logger.timed_operation("joint_schedule", n=20, t=20):
                schedule = joint_schedule(system, 20, 2.2, 2.3)
        """
        start_time = time.perf_counter()
        self.debug(f"Starting {operation}", **context)

        try:
            yield
            elapsed = time.perf_counter() - start_time
            self.info(f"Completed {operation}", duration_ms=int(elapsed * 1000), **context)
        except Exception as e:
            elapsed = time.perf_counter() - start_time
            self.error(
                f"Failed {operation}",
                exc_info=True,
                duration_ms=int(elapsed * 1000),
                error=str(e),
                **context,
            )
            raise


def log_schedule_start(
    logger: ContextLogger, mode: str, n: int, t: int, d_s: float | None, d_a: float | None
) -> None:
    """Log the start of a schedule synthesis."""
    logger.info("Starting schedule synthesis", mode=mode, n=n, t=t, d_s=d_s, d_a=d_a)


def log_schedule_complete(
    logger: ContextLogger, provenance: str, sensor_pairs: int, actuator_pairs: int
) -> None:
    """Log schedule synthesis completion with its active pair counts."""
    logger.info(
        "Schedule synthesis complete",
        provenance=provenance,
        sensor_pairs=sensor_pairs,
        actuator_pairs=actuator_pairs,
    )


def log_sparsifier_iteration(
    logger: ContextLogger,
    tau: int,
    lower: float,
    upper: float,
    index: int,
    step: float,
    lambda_min: float,
    lambda_max: float,
) -> None:
    """Log a single barrier step (DEBUG only)."""
    if not logger.is_enabled_for(logging.DEBUG):
        return
    logger.debug(
        "Barrier step",
        tau=tau,
        lower=lower,
        upper=upper,
        index=index,
        step=step,
        lambda_min=lambda_min,
        lambda_max=lambda_max,
    )


def log_bound_check(logger: ContextLogger, bound: str, empirical: float, theory: float, ok: bool):
    """Log one epsilon bound comparison, at WARNING when it fails."""
    if ok:
        logger.debug("Bound holds", bound=bound, empirical=empirical, theory=theory)
    else:
        logger.warning("Bound violated", bound=bound, empirical=empirical, theory=theory)
