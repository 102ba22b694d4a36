"""
Certified bounds over many random systems.

Every joint schedule at t=24, d_s=d_a=1 on an n=6, m=p=4 system has
kappa = 24, x = 1/2 and so a per-side bound of ln 3.
"""

import logging
import math
import time

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gramslice.config import ScheduleMode
from gramslice.core.gramian_hankel import gramians, hankel_matrix, hankel_spectrum
from gramslice.core.scheduler import build_schedule
from gramslice.core.system_model import random_system
from gramslice.output.json_out import dumps, schedule_to_dict
from gramslice.verification import verify_schedule

pytestmark = pytest.mark.integration

LOG_THREE = math.log(3.0)


@pytest.mark.slow
class TestJointBound:
    """Joint schedules across 100 seeded systems."""

    @pytest.mark.parametrize("seed", range(100))
    def test_hankel_spectrum_within_bound(self, acceptance_system, seed):
        system = acceptance_system(seed)
        schedule = build_schedule(system, 24, ScheduleMode.JOINT, 1.0, 1.0)
        report = verify_schedule(system, schedule)

        assert len(schedule.sensors) <= 24
        assert len(schedule.actuators) <= 24
        assert report.epsilon_theory_sensors == pytest.approx(LOG_THREE, abs=1e-12)
        assert report.epsilon_hankel <= 2 * LOG_THREE + 1e-8
        assert report.epsilon_sensors <= LOG_THREE + 1e-8
        assert report.epsilon_actuators <= LOG_THREE + 1e-8
        assert report.passed
        for value in report.metric_log_ratios.values():
            assert value <= report.epsilon_hankel + 1e-8


@pytest.mark.slow
class TestSeparationBound:
    """Independently sparsified sides compose additively."""

    @pytest.mark.parametrize("seed", range(50))
    def test_separation_composes(self, acceptance_system, seed):
        system = acceptance_system(1000 + seed)
        report = verify_schedule(system, build_schedule(system, 24, ScheduleMode.SEPARATION, 1.0, 1.25))
        assert report.passed
        assert report.epsilon_hankel <= report.epsilon_sensors + report.epsilon_actuators + 1e-8


class TestHankelConsistency:
    """Gramian-derived singular values agree with an explicit SVD of H(t)."""

    @pytest.mark.parametrize("seed", range(50))
    def test_against_explicit_svd(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 9))
        m, p = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        system = random_system(n, m, p, seed=500 + seed)
        t = 2 * n + 1
        spectrum = hankel_spectrum(gramians(system, t))
        explicit = np.linalg.svd(hankel_matrix(system, t), compute_uv=False)[:n]
        assert_allclose(spectrum.values, explicit, rtol=1e-8, atol=1e-8 * explicit[0])


class TestBarrierTrace:
    """Every recorded barrier step keeps the spectrum strictly inside (L, U)."""

    @pytest.mark.parametrize("seed", range(10))
    def test_trace_records(self, acceptance_system, seed):
        records = []
        system = acceptance_system(seed)
        build_schedule(
            system,
            24,
            ScheduleMode.JOINT,
            1.0,
            1.0,
            trace=lambda side, record: records.append((side, record)),
        )
        assert len(records) == 2 * 25
        for _, record in records:
            assert record.lower < record.lambda_min
            assert record.lambda_max < record.upper


class TestDeterminism:
    def test_repeated_runs_serialize_identically(self, acceptance_system):
        system = acceptance_system(3)
        first = dumps(schedule_to_dict(build_schedule(system, 24, ScheduleMode.JOINT, 1.0, 1.0)))
        second = dumps(schedule_to_dict(build_schedule(system, 24, ScheduleMode.JOINT, 1.0, 1.0)))
        assert first == second


@pytest.mark.performance
class TestScaling:
    def test_moderate_system_completes_quickly(self):
        system = random_system(20, 10, 20, seed=1)
        start = time.perf_counter()
        schedule = build_schedule(system, 20, ScheduleMode.JOINT, 2.2, 2.2)
        elapsed = time.perf_counter() - start
        assert len(schedule.sensors) <= 44
        assert elapsed < 60.0

    @pytest.mark.slow
    def test_doubling_horizon_scales_moderately(self, swing_demo):
        def best_time(t: int) -> float:
            timings = []
            for _ in range(3):
                start = time.perf_counter()
                build_schedule(swing_demo, t, ScheduleMode.JOINT, 2.2, 2.2)
                timings.append(time.perf_counter() - start)
            return min(timings)

        build_schedule(swing_demo, 20, ScheduleMode.JOINT, 2.2, 2.2)
        ratio = best_time(40) / best_time(20)
        logging.getLogger(__name__).info("Joint schedule time ratio t=40/t=20: %.2f", ratio)
        # Twice the iterations over twice the candidates.
        assert ratio <= 5.0
