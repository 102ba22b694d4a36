"""Shared pytest fixtures for gramslice tests."""

import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from gramslice.config import ScheduleMode
from gramslice.core.scheduler import build_schedule
from gramslice.core.system_model import random_system
from gramslice.models import LtiSystem, Schedule, SwingParams
from gramslice.output.json_out import write_schedule, write_system


@pytest.fixture(autouse=True)
def reset_gramslice_logging():
    """Drop handlers bound to a captured stream once a test finishes."""
    yield
    root = logging.getLogger("gramslice")
    root.handlers.clear()
    root.propagate = True


@pytest.fixture
def small_system() -> LtiSystem:
    """Seeded n=4 system with two inputs and two outputs."""
    return random_system(4, 2, 2, seed=0)


@pytest.fixture
def acceptance_system() -> Callable[[int], LtiSystem]:
    """Factory for the n=6, m=p=4 systems used by the certified-bound checks."""

    def make(seed: int) -> LtiSystem:
        return random_system(6, 4, 4, seed=seed)

    return make


@pytest.fixture
def non_minimal_system() -> LtiSystem:
    """Second state is neither reachable nor observable."""
    return LtiSystem(
        A=np.diag([0.5, 0.3]),
        B=np.array([[1.0], [0.0]]),
        C=np.array([[1.0, 0.0]]),
    )


@pytest.fixture
def single_generator() -> SwingParams:
    """One undamped, uncoupled generator: the nilpotent closed-form case."""
    return SwingParams(
        inertia=np.array([1.0]),
        damping=np.array([0.0]),
        coupling=np.zeros((1, 1)),
        dt=0.2,
    )


@pytest.fixture
def isotropic_family() -> np.ndarray:
    """4 x 40 candidate family whose columns sum (as u u^T) to the identity."""
    rng = np.random.default_rng(7)
    V = rng.standard_normal((4, 40))
    W, _, Zt = np.linalg.svd(V, full_matrices=False)
    return W @ Zt


@pytest.fixture
def joint_schedule_small(small_system: LtiSystem) -> Schedule:
    """Joint schedule of the small system at t=12, d_s = d_a = 1 (kappa = 12)."""
    return build_schedule(small_system, 12, ScheduleMode.JOINT, 1.0, 1.0)


@pytest.fixture
def system_file(tmp_path: Path, small_system: LtiSystem) -> Path:
    path = tmp_path / "system.json"
    write_system(small_system, path)
    return path


@pytest.fixture
def schedule_file(tmp_path: Path, joint_schedule_small: Schedule) -> Path:
    path = tmp_path / "schedule.json"
    write_schedule(joint_schedule_small, path)
    return path
