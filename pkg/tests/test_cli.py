"""Tests for the gramslice command-line interface."""

import json
from pathlib import Path

import pytest
import typer
from typer.testing import CliRunner

import gramslice.cli as cli
from gramslice import __version__
from gramslice.cli import EXIT_BOUND_VIOLATION, EXIT_INPUT_ERROR, EXIT_OK, app
from gramslice.models import Schedule
from gramslice.output.json_out import write_schedule, write_system

runner = CliRunner()


def _schedule(system_file: Path, out: Path, *extra: str, env=None):
    args = ["schedule", "-s", str(system_file), "-t", "12", "--ds", "1", "--da", "1", "-o", str(out), *extra]
    return runner.invoke(app, args, env=env)


class TestVersion:
    def test_version_flag(self):
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == EXIT_OK
        assert f"gramslice {__version__}" in result.stdout

    def test_no_arguments_shows_help(self):
        result = runner.invoke(app, [])
        assert "schedule" in result.output


class TestScheduleCommand:
    """gramslice schedule."""

    def test_writes_schedule_and_report(self, system_file, tmp_path):
        out = tmp_path / "schedule.json"
        result = _schedule(system_file, out)
        assert result.exit_code == EXIT_OK, result.output
        schedule = json.loads(out.read_text())
        report = json.loads((tmp_path / "schedule.report.json").read_text())
        assert schedule["t"] == 12
        assert schedule["budgets"]["kappa_s"] == 12
        assert report["passed"] is True
        assert report["epsilon_hankel"] <= report["epsilon_theory_joint"] + 1e-8

    def test_full_mode_is_exact(self, system_file, tmp_path):
        out = tmp_path / "full.json"
        result = runner.invoke(
            app, ["schedule", "-s", str(system_file), "-t", "12", "--mode", "full", "-o", str(out)]
        )
        assert result.exit_code == EXIT_OK, result.output
        report = json.loads((tmp_path / "full.report.json").read_text())
        assert report["epsilon_hankel"] == 0.0
        assert report["provenance"] == "full"

    def test_horizon_shorter_than_state(self, system_file, tmp_path):
        result = runner.invoke(
            app,
            ["schedule", "-s", str(system_file), "-t", "3", "--ds", "1", "--da", "1", "-o", str(tmp_path / "s.json")],
        )
        assert result.exit_code == EXIT_INPUT_ERROR
        assert "horizon" in result.output
        assert not (tmp_path / "s.json").exists()

    def test_horizon_required(self, system_file, tmp_path):
        result = runner.invoke(app, ["schedule", "-s", str(system_file), "-o", str(tmp_path / "s.json")])
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_infeasible_budget(self, system_file, tmp_path):
        result = runner.invoke(
            app,
            ["schedule", "-s", str(system_file), "-t", "12", "--ds", "0.25", "--da", "1", "-o", str(tmp_path / "s.json")],
        )
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_non_minimal_system(self, non_minimal_system, tmp_path):
        path = tmp_path / "nonminimal.json"
        write_system(non_minimal_system, path)
        result = runner.invoke(
            app,
            ["schedule", "-s", str(path), "-t", "4", "--mode", "full", "-o", str(tmp_path / "s.json")],
        )
        assert result.exit_code == EXIT_INPUT_ERROR
        assert "minimal" in result.output

    def test_missing_system_file(self, tmp_path):
        result = _schedule(tmp_path / "absent.json", tmp_path / "s.json")
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_mode_from_environment(self, system_file, tmp_path):
        out = tmp_path / "sensor.json"
        result = _schedule(system_file, out, env={"GRAMSLICE_MODE": "sensor"})
        assert result.exit_code == EXIT_OK, result.output
        assert json.loads(out.read_text())["provenance"] == "sensor-only"

    def test_flag_overrides_environment(self, system_file, tmp_path):
        out = tmp_path / "sep.json"
        result = _schedule(system_file, out, "--mode", "separation", env={"GRAMSLICE_MODE": "sensor"})
        assert result.exit_code == EXIT_OK, result.output
        assert json.loads(out.read_text())["provenance"] == "separation"

    def test_invalid_environment_mode(self, system_file, tmp_path):
        result = _schedule(system_file, tmp_path / "s.json", env={"GRAMSLICE_MODE": "greedy"})
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_trace_file(self, system_file, tmp_path):
        trace = tmp_path / "trace.jsonl"
        result = _schedule(system_file, tmp_path / "s.json", "--trace", str(trace))
        assert result.exit_code == EXIT_OK, result.output
        lines = trace.read_text().splitlines()
        # One record per barrier step plus a final record, on each side.
        assert len(lines) == 2 * 13
        sides = {json.loads(line)["side"] for line in lines}
        assert sides == {"sensors", "actuators"}

    def test_normalized_copy(self, system_file, tmp_path):
        out = tmp_path / "s.json"
        result = _schedule(system_file, out, "--normalize")
        assert result.exit_code == EXIT_OK, result.output
        normalized = json.loads((tmp_path / "s.normalized.json").read_text())
        total = sum(entry["scale"] ** 2 for entry in normalized["sensors"])
        assert total == pytest.approx(4 * 1.0)

    def test_horizon_from_config(self, system_file, tmp_path):
        config = tmp_path / "gramslice.yaml"
        config.write_text("schedule:\n  horizon: 12\n  d_s: 1\n  d_a: 1\n")
        out = tmp_path / "s.json"
        result = runner.invoke(app, ["schedule", "-s", str(system_file), "-c", str(config), "-o", str(out)])
        assert result.exit_code == EXIT_OK, result.output
        assert json.loads(out.read_text())["t"] == 12

    def test_deterministic_output(self, system_file, tmp_path):
        _schedule(system_file, tmp_path / "a.json")
        _schedule(system_file, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        assert (tmp_path / "a.report.json").read_bytes() == (tmp_path / "b.report.json").read_bytes()

    def test_direct_call_exit_code(self, system_file, tmp_path):
        with pytest.raises(typer.Exit) as excinfo:
            cli.schedule(system_file=system_file, horizon=2, d_s=1.0, d_a=1.0, out_file=tmp_path / "s.json")
        assert excinfo.value.exit_code == EXIT_INPUT_ERROR


class TestVerifyCommand:
    """gramslice verify."""

    def test_report_matches_schedule_report(self, system_file, tmp_path):
        out = tmp_path / "s.json"
        assert _schedule(system_file, out).exit_code == EXIT_OK
        report = tmp_path / "verify.json"
        result = runner.invoke(app, ["verify", str(out), "-s", str(system_file), "-r", str(report)])
        assert result.exit_code == EXIT_OK, result.output
        assert report.read_bytes() == (tmp_path / "s.report.json").read_bytes()

    def test_tampered_schedule_fails(self, system_file, tmp_path):
        out = tmp_path / "s.json"
        assert _schedule(system_file, out).exit_code == EXIT_OK
        data = json.loads(out.read_text())
        for entry in data["sensors"]:
            entry["scale"] *= 10.0
        out.write_text(json.dumps(data))
        result = runner.invoke(app, ["verify", str(out), "-s", str(system_file)])
        assert result.exit_code == EXIT_BOUND_VIOLATION

    def test_dimension_mismatch(self, system_file, tmp_path):
        schedule = tmp_path / "s.json"
        schedule.write_text(json.dumps({"t": 12, "m": 3, "p": 2}))
        result = runner.invoke(app, ["verify", str(schedule), "-s", str(system_file)])
        assert result.exit_code == EXIT_INPUT_ERROR


class TestSweepCommand:
    """gramslice sweep."""

    def test_grid_files(self, system_file, tmp_path):
        out_dir = tmp_path / "sweep"
        result = runner.invoke(
            app,
            ["sweep", "-s", str(system_file), "-t", "12", "--ds", "1,1.5", "--da", "1", "-o", str(out_dir)],
        )
        assert result.exit_code == EXIT_OK, result.output
        lines = (out_dir / "epsilon_grid.csv").read_text().splitlines()
        assert lines[0] == "d_s \\ d_a,1,full"
        assert [line.split(",")[0] for line in lines[1:]] == ["1", "1.5", "full"]
        assert (out_dir / "cells.csv").exists()

    def test_skipped_cells_keep_exit_zero(self, system_file, tmp_path):
        out_dir = tmp_path / "sweep"
        result = runner.invoke(
            app,
            ["sweep", "-s", str(system_file), "-t", "12", "--ds", "0.25", "--da", "1", "-o", str(out_dir)],
        )
        assert result.exit_code == EXIT_OK, result.output
        assert "skip:" in (out_dir / "theory_grid.csv").read_text()

    def test_invalid_thread_environment(self, system_file, tmp_path):
        result = runner.invoke(
            app,
            ["sweep", "-s", str(system_file), "-t", "12", "--ds", "1", "--da", "1", "-o", str(tmp_path / "o")],
            env={"GRAMSLICE_THREADS": "many"},
        )
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_budget_list_required(self, system_file, tmp_path):
        result = runner.invoke(app, ["sweep", "-s", str(system_file), "-t", "12", "--ds", "1", "-o", str(tmp_path)])
        assert result.exit_code == EXIT_INPUT_ERROR

    def test_profile_summary(self, system_file, tmp_path):
        result = runner.invoke(
            app,
            [
                "sweep", "-s", str(system_file), "-t", "12", "--ds", "1", "--da", "1",
                "--mode", "sensor", "--profile", "-o", str(tmp_path / "o"),
            ],
        )
        assert result.exit_code == EXIT_OK, result.output
        assert "SWEEP PERFORMANCE PROFILE" in result.output


class TestOtherCommands:
    """heatmap, swing, random-system, inspect and init."""

    def test_heatmap(self, schedule_file, tmp_path):
        result = runner.invoke(app, ["heatmap", str(schedule_file), "-o", str(tmp_path), "--stem", "hm"])
        assert result.exit_code == EXIT_OK, result.output
        assert (tmp_path / "hm_sensors.csv").exists()
        assert (tmp_path / "hm_actuators.csv").exists()

    def test_heatmap_single_active_pair(self, tmp_path):
        schedule_path = tmp_path / "single.json"
        write_schedule(Schedule(t=4, m=1, p=3, sensors={(3, 2): 2.0}), schedule_path)
        result = runner.invoke(app, ["heatmap", str(schedule_path), "-o", str(tmp_path)])
        assert result.exit_code == EXIT_OK, result.output

        sensors = (tmp_path / "single_sensors.csv").read_text().splitlines()
        assert sensors == ["channel,k=0,k=1,k=2,k=3", "0,0,0,0,0", "1,0,0,0,0", "2,0,0,0,4"]
        actuators = (tmp_path / "single_actuators.csv").read_text().splitlines()
        assert actuators == ["channel,k=0,k=1,k=2,k=3", "0,0,0,0,0"]

    def test_swing_demo(self, tmp_path):
        out = tmp_path / "swing.json"
        params = tmp_path / "params.json"
        result = runner.invoke(app, ["swing", "-g", "3", "-o", str(out), "--params-out", str(params)])
        assert result.exit_code == EXIT_OK, result.output
        system = json.loads(out.read_text())
        assert (system["n"], system["m"], system["p"]) == (6, 3, 6)
        assert system["labels"]["inputs"][0] == "u1"

        again = tmp_path / "again.json"
        result = runner.invoke(app, ["swing", str(params), "-o", str(again)])
        assert result.exit_code == EXIT_OK, result.output
        assert again.read_bytes() == out.read_bytes()

    def test_random_system(self, tmp_path):
        out = tmp_path / "sys.json"
        result = runner.invoke(app, ["random-system", "--n", "3", "--m", "2", "--p", "1", "--seed", "5", "-o", str(out)])
        assert result.exit_code == EXIT_OK, result.output
        data = json.loads(out.read_text())
        assert (data["n"], data["m"], data["p"]) == (3, 2, 1)
        assert len(data["A"]) == 9

    def test_inspect(self, system_file):
        result = runner.invoke(app, ["inspect", str(system_file), "-t", "8"])
        assert result.exit_code == EXIT_OK, result.output
        assert "Hankel norm" in result.output

    def test_init(self, tmp_path):
        path = tmp_path / "gramslice.yaml"
        result = runner.invoke(app, ["init", "-f", str(path), "--t", "20"])
        assert result.exit_code == EXIT_OK, result.output
        assert "horizon: 20" in path.read_text()

        assert runner.invoke(app, ["init", "-f", str(path)]).exit_code == EXIT_INPUT_ERROR
        assert runner.invoke(app, ["init", "-f", str(path), "--force"]).exit_code == EXIT_OK
