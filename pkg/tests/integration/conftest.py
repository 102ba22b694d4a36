"""Shared fixtures for integration tests."""

import os
import sys
from pathlib import Path

import pytest

from gramslice.core.system_model import random_swing_params, swing_system
from gramslice.models import LtiSystem

SRC_DIR = Path(__file__).resolve().parents[2] / "src"


@pytest.fixture(scope="session")
def swing_demo() -> LtiSystem:
    """Ten-generator swing network from the default seed (n=20, m=10, p=20)."""
    return swing_system(random_swing_params(10))


@pytest.fixture
def cli_env() -> dict[str, str]:
    """Environment for running ``python -m gramslice`` from a source checkout."""
    env = {key: value for key, value in os.environ.items() if not key.startswith("GRAMSLICE_")}
    existing = env.get("PYTHONPATH")
    env["PYTHONPATH"] = str(SRC_DIR) + (os.pathsep + existing if existing else "")
    return env


@pytest.fixture
def python() -> str:
    return sys.executable
