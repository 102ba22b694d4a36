"""Tests for JSON artifacts: systems, schedules, reports and traces."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from gramslice.config import ScheduleMode
from gramslice.core.scheduler import build_schedule
from gramslice.models import Provenance, Schedule, ScheduleBudgets
from gramslice.output.json_out import (
    NumericEncoder,
    dumps,
    sanitize,
    schedule_to_dict,
    system_to_dict,
    trace_lines,
    write_report,
    write_schedule,
    write_trace,
)
from gramslice.verification import verify_schedule


class TestSanitize:
    """Non-finite values and numpy types."""

    def test_infinities_become_strings(self):
        data = sanitize({"a": math.inf, "b": [-math.inf, math.nan], "c": 1.5})
        assert data == {"a": "inf", "b": ["-inf", "nan"], "c": 1.5}

    def test_numpy_values(self):
        data = sanitize({"x": np.float64(2.5), "y": np.array([1.0, np.inf])})
        assert data == {"x": 2.5, "y": [1.0, "inf"]}

    def test_dumps_is_strict_json(self):
        text = dumps({"value": math.inf, "count": np.int64(3), "flag": np.bool_(True)})
        assert json.loads(text) == {"value": "inf", "count": 3, "flag": True}
        assert text.endswith("\n")

    def test_compact_dumps(self):
        assert dumps({"a": 1}, pretty=False) == '{"a": 1}'

    def test_encoder_handles_enums_and_paths(self):
        text = json.dumps({"p": Provenance.JOINT, "path": Path("a/b")}, cls=NumericEncoder)
        assert json.loads(text) == {"p": "joint", "path": str(Path("a/b"))}

    def test_encoder_rejects_unknown_objects(self):
        with pytest.raises(TypeError):
            json.dumps({"x": object()}, cls=NumericEncoder)


class TestSystemToDict:
    """System file layout."""

    def test_row_major_matrices(self, small_system):
        data = system_to_dict(small_system)
        assert (data["n"], data["m"], data["p"]) == (4, 2, 2)
        assert len(data["A"]) == 16
        assert data["B"][1] == small_system.B[0, 1]
        assert data["C"][4] == small_system.C[1, 0]
        assert "labels" not in data


class TestScheduleToDict:
    """Schedule file layout."""

    def test_pairs_sorted(self):
        schedule = Schedule(t=3, m=1, p=2, sensors={(2, 0): 1.0, (0, 1): 0.5, (0, 0): 2.0})
        data = schedule_to_dict(schedule)
        assert [(e["k"], e["i"]) for e in data["sensors"]] == [(0, 0), (0, 1), (2, 0)]
        assert data["actuators"] == []
        assert data["provenance"] == "joint"
        assert "budgets" not in data

    def test_budgets_recorded(self):
        schedule = Schedule(
            t=3,
            m=1,
            p=1,
            provenance=Provenance.SEPARATION,
            budgets=ScheduleBudgets(d_s=1.0, d_a=1.0, kappa_s=3, kappa_a=None),
        )
        data = schedule_to_dict(schedule)
        assert data["provenance"] == "separation"
        assert data["budgets"] == {
            "d_s": 1.0,
            "d_a": 1.0,
            "kappa_s": 3,
            "kappa_a": None,
            "normalization": "proof",
        }


class TestWriters:
    """Files on disk."""

    def test_schedule_bytes_deterministic(self, small_system, tmp_path):
        first = build_schedule(small_system, 12, ScheduleMode.JOINT, 1.0, 1.0)
        second = build_schedule(small_system, 12, ScheduleMode.JOINT, 1.0, 1.0)
        write_schedule(first, tmp_path / "a.json")
        write_schedule(second, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_report_is_valid_json(self, small_system, joint_schedule_small, tmp_path):
        path = tmp_path / "report.json"
        write_report(verify_schedule(small_system, joint_schedule_small), path)
        data = json.loads(path.read_text())
        assert data["passed"] is True
        assert data["kappa_s"] == 12

    def test_trace_jsonl(self, small_system, tmp_path):
        records = []
        build_schedule(
            small_system,
            12,
            ScheduleMode.SENSOR,
            1.0,
            None,
            trace=lambda side, record: records.append((side, record)),
        )
        lines = trace_lines(records)
        assert len(lines) == 13
        first = json.loads(lines[0])
        assert first["side"] == "sensors"
        assert first["tau"] == 0
        assert json.loads(lines[-1])["final"] is True

        path = tmp_path / "trace.jsonl"
        assert write_trace(records, path) == 13
        assert path.read_text().count("\n") == 13
