"""Tests for the structured logging setup."""

import json
import logging

import pytest

from gramslice.logging import (
    HumanReadableFormatter,
    StructuredFormatter,
    get_logger,
    log_bound_check,
    setup_logging,
)


def _record(msg: str = "hello", context=None) -> logging.LogRecord:
    record = logging.LogRecord("gramslice.test", logging.INFO, __file__, 1, msg, None, None)
    if context is not None:
        record.context = context
    return record


class TestFormatters:
    """Human-readable and JSON-lines output."""

    def test_human_readable(self):
        line = HumanReadableFormatter().format(_record(context={"kappa": 24, "eps": 1.23456789}))
        assert "INFO: hello" in line
        assert "(kappa=24, eps=1.23457)" in line

    def test_structured(self):
        data = json.loads(StructuredFormatter().format(_record(context={"side": "sensors"})))
        assert data["level"] == "INFO"
        assert data["logger"] == "gramslice.test"
        assert data["message"] == "hello"
        assert data["context"] == {"side": "sensors"}

    def test_structured_without_context(self):
        data = json.loads(StructuredFormatter().format(_record()))
        assert "context" not in data


class TestSetupLogging:
    """Levels and stderr routing."""

    def test_info_goes_to_stderr(self, capsys):
        setup_logging()
        get_logger("gramslice.test").info("Schedule written", path="s.json")
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "Schedule written (path=s.json)" in captured.err

    def test_quiet_hides_info(self, capsys):
        setup_logging(quiet=True)
        logger = get_logger("gramslice.test")
        logger.info("hidden")
        logger.warning("shown")
        err = capsys.readouterr().err
        assert "hidden" not in err
        assert "shown" in err

    def test_verbose_shows_debug(self, capsys):
        setup_logging(verbose=True)
        get_logger("gramslice.test").debug("Barrier step", tau=3)
        assert "tau=3" in capsys.readouterr().err

    def test_structured_output(self, capsys):
        setup_logging(structured=True)
        get_logger("test").info("Sweep complete", cells=12)
        data = json.loads(capsys.readouterr().err.strip())
        assert data["logger"] == "gramslice.test"
        assert data["context"] == {"cells": 12}


class TestContextLogger:
    """Context propagation and timing."""

    def test_with_context(self, capsys):
        setup_logging()
        logger = get_logger("gramslice.test").with_context(side="actuators")
        logger.info("Pass complete", kappa=24)
        assert "(side=actuators, kappa=24)" in capsys.readouterr().err

    def test_timed_operation(self, capsys):
        setup_logging()
        with get_logger("gramslice.test").timed_operation("verify", n=4):
            pass
        err = capsys.readouterr().err
        assert "Completed verify" in err
        assert "duration_ms=" in err

    def test_timed_operation_failure(self, capsys):
        setup_logging()
        with pytest.raises(RuntimeError):
            with get_logger("gramslice.test").timed_operation("sweep"):
                raise RuntimeError("boom")
        err = capsys.readouterr().err
        assert "ERROR: Failed sweep" in err
        assert "error=boom" in err

    def test_bound_check_levels(self, capsys):
        setup_logging()
        logger = get_logger("gramslice.test")
        log_bound_check(logger, "hankel", 0.5, 1.0, ok=True)
        log_bound_check(logger, "sensors", 2.0, 1.0, ok=False)
        err = capsys.readouterr().err
        assert "Bound holds" not in err
        assert "WARNING: Bound violated (bound=sensors" in err
