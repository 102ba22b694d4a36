"""Tests for loading system, swing-parameter and schedule files."""

import json

import numpy as np
import pytest

from gramslice.data_files import (
    load_schedule,
    load_swing_params,
    load_system,
    schedule_from_dict,
    system_from_dict,
)
from gramslice.exceptions import SystemFileError
from gramslice.models import Provenance
from gramslice.output.json_out import swing_params_to_dict, write_json


def _write(tmp_path, data, name="file.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


class TestLoadSystem:
    """System files written by gramslice or by hand."""

    def test_round_trip(self, system_file, small_system):
        loaded = load_system(system_file)
        assert np.array_equal(loaded.A, small_system.A)
        assert np.array_equal(loaded.B, small_system.B)
        assert np.array_equal(loaded.C, small_system.C)

    def test_nested_matrices_accepted(self):
        system = system_from_dict(
            {"n": 2, "m": 1, "p": 1, "A": [[0.5, 0.0], [0.1, 0.2]], "B": [[1.0], [0.0]], "C": [[0.0, 1.0]]}
        )
        assert system.A[1, 0] == 0.1

    def test_labels(self):
        system = system_from_dict(
            {
                "n": 1,
                "m": 1,
                "p": 1,
                "A": [0.5],
                "B": [1.0],
                "C": [1.0],
                "labels": {"inputs": ["u"], "outputs": ["y"]},
            }
        )
        assert system.input_labels == ("u",)
        assert system.output_labels == ("y",)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SystemFileError, match="does not exist"):
            load_system(tmp_path / "absent.json")

    def test_directory(self, tmp_path):
        with pytest.raises(SystemFileError, match="not a file"):
            load_system(tmp_path)

    def test_invalid_json(self, tmp_path):
        with pytest.raises(SystemFileError, match="Invalid JSON"):
            load_system(_write(tmp_path, "{not json"))

    def test_top_level_array(self, tmp_path):
        with pytest.raises(SystemFileError, match="JSON object"):
            load_system(_write(tmp_path, [1, 2]))

    def test_missing_key(self, tmp_path):
        with pytest.raises(SystemFileError, match="missing required key 'C'"):
            load_system(_write(tmp_path, {"n": 1, "m": 1, "p": 1, "A": [1.0], "B": [1.0]}))

    def test_wrong_entry_count(self, tmp_path):
        data = {"n": 2, "m": 1, "p": 1, "A": [1.0, 2.0, 3.0], "B": [1.0, 0.0], "C": [1.0, 0.0]}
        with pytest.raises(SystemFileError, match="expected 2x2"):
            load_system(_write(tmp_path, data))

    @pytest.mark.parametrize("value", [0, -1, 1.5, True, "2"])
    def test_dimensions_must_be_positive_integers(self, tmp_path, value):
        data = {"n": value, "m": 1, "p": 1, "A": [1.0], "B": [1.0], "C": [1.0]}
        with pytest.raises(SystemFileError, match="positive integer"):
            load_system(_write(tmp_path, data))

    def test_non_finite_entries(self, tmp_path):
        path = _write(tmp_path, '{"n": 1, "m": 1, "p": 1, "A": [NaN], "B": [1.0], "C": [1.0]}')
        with pytest.raises(SystemFileError):
            load_system(path)


class TestLoadSwingParams:
    """Swing-equation parameter files."""

    def test_round_trip(self, tmp_path, single_generator):
        path = tmp_path / "swing.json"
        write_json(swing_params_to_dict(single_generator), path)
        loaded = load_swing_params(path)
        assert loaded.generators == 1
        assert loaded.dt == 0.2

    def test_asymmetric_coupling(self, tmp_path):
        data = {"inertia": [1.0, 1.0], "damping": [0.1, 0.1], "coupling": [1.0, -1.0, 0.0, 0.0], "dt": 0.2}
        with pytest.raises(SystemFileError, match="symmetric"):
            load_swing_params(_write(tmp_path, data))


class TestLoadSchedule:
    """Schedule files."""

    def test_round_trip(self, schedule_file, joint_schedule_small):
        loaded = load_schedule(schedule_file)
        assert loaded.sensors == joint_schedule_small.sensors
        assert loaded.actuators == joint_schedule_small.actuators
        assert loaded.budgets == joint_schedule_small.budgets
        assert loaded.provenance is Provenance.JOINT

    def test_defaults(self):
        schedule = schedule_from_dict({"t": 2, "m": 1, "p": 1})
        assert schedule.sensors == {}
        assert schedule.budgets is None

    def test_duplicate_pair(self, tmp_path):
        data = {
            "t": 2,
            "m": 1,
            "p": 1,
            "sensors": [{"k": 0, "i": 0, "scale": 1.0}, {"k": 0, "i": 0, "scale": 2.0}],
        }
        with pytest.raises(SystemFileError, match="duplicate sensors entry"):
            load_schedule(_write(tmp_path, data))

    def test_out_of_range_pair(self, tmp_path):
        data = {"t": 2, "m": 1, "p": 1, "actuators": [{"k": 5, "i": 0, "scale": 1.0}]}
        with pytest.raises(SystemFileError, match="time index 5"):
            load_schedule(_write(tmp_path, data))

    def test_negative_scale(self, tmp_path):
        data = {"t": 2, "m": 1, "p": 1, "sensors": [{"k": 0, "i": 0, "scale": -1.0}]}
        with pytest.raises(SystemFileError, match=">= 0"):
            load_schedule(_write(tmp_path, data))

    def test_unknown_provenance(self, tmp_path):
        with pytest.raises(SystemFileError, match="Invalid schedule"):
            load_schedule(_write(tmp_path, {"t": 2, "m": 1, "p": 1, "provenance": "greedy"}))
