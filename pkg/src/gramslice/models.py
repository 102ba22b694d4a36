from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from gramslice.constants import PSD_RTOL, SCALE_FLOOR, SYMMETRY_RTOL
from gramslice.exceptions import (
    DimensionMismatchError,
    NonFiniteError,
    NotPositiveDefiniteError,
    ScheduleError,
)

SchedulePairs = dict[tuple[int, int], float]
"""Sparse scalings keyed by (k, i): time step k and channel index i."""


def _frozen_matrix(value: Any, what: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    matrix = np.array(value, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatchError(what, "a 2-D matrix", f"{matrix.ndim}-D array")
    if shape is not None and matrix.shape != shape:
        raise DimensionMismatchError(what, shape, matrix.shape)
    if not np.all(np.isfinite(matrix)):
        raise NonFiniteError(what)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class LtiSystem:
    """
    Discrete-time LTI system x(k+1) = A x(k) + B u(k), y(k) = C x(k).

    Matrices are copied to read-only float arrays on construction, so a
    system can be shared between threads without defensive copies.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    input_labels: tuple[str, ...] = ()
    output_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        A = _frozen_matrix(self.A, "A")
        n = A.shape[0]
        if n == 0 or A.shape != (n, n):
            raise DimensionMismatchError("A", "a non-empty square matrix", A.shape)
        B = _frozen_matrix(self.B, "B")
        C = _frozen_matrix(self.C, "C")
        if B.shape[0] != n or B.shape[1] == 0:
            raise DimensionMismatchError("B", f"({n}, m) with m >= 1", B.shape)
        if C.shape[1] != n or C.shape[0] == 0:
            raise DimensionMismatchError("C", f"(p, {n}) with p >= 1", C.shape)

        input_labels = tuple(self.input_labels)
        output_labels = tuple(self.output_labels)
        if input_labels and len(input_labels) != B.shape[1]:
            raise DimensionMismatchError("input labels", B.shape[1], len(input_labels))
        if output_labels and len(output_labels) != C.shape[0]:
            raise DimensionMismatchError("output labels", C.shape[0], len(output_labels))

        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "input_labels", input_labels)
        object.__setattr__(self, "output_labels", output_labels)

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    @property
    def m(self) -> int:
        return int(self.B.shape[1])

    @property
    def p(self) -> int:
        return int(self.C.shape[0])

    def dual(self) -> "LtiSystem":
        """(A, B, C) -> (A^T, C^T, B^T): inputs and outputs trade places."""
        return LtiSystem(
            A=self.A.T,
            B=self.C.T,
            C=self.B.T,
            input_labels=self.output_labels,
            output_labels=self.input_labels,
        )


@dataclass(frozen=True, eq=False)
class SwingParams:
    """Linearized swing-equation network: inertia, damping, coupling and sampling interval."""

    inertia: np.ndarray
    damping: np.ndarray
    coupling: np.ndarray
    dt: float

    def __post_init__(self) -> None:
        inertia = np.array(self.inertia, dtype=float).reshape(-1)
        damping = np.array(self.damping, dtype=float).reshape(-1)
        g = inertia.size
        if g == 0:
            raise DimensionMismatchError("inertia", "at least one generator", 0)
        if damping.size != g:
            raise DimensionMismatchError("damping", g, damping.size)
        coupling = _frozen_matrix(self.coupling, "coupling", (g, g))
        if not (np.all(np.isfinite(inertia)) and np.all(np.isfinite(damping))):
            raise NonFiniteError("swing parameters")
        if np.any(inertia <= 0):
            raise ValueError("All inertia coefficients must be strictly positive")
        if np.any(damping < 0):
            raise ValueError("Damping coefficients must be nonnegative")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ValueError(f"Sampling interval must be positive, got {self.dt}")

        scale = float(np.max(np.abs(coupling))) if coupling.size else 0.0
        if np.max(np.abs(coupling - coupling.T), initial=0.0) > SYMMETRY_RTOL * max(scale, 1e-300):
            raise ValueError("Coupling matrix must be symmetric")
        if np.max(np.abs(coupling.sum(axis=1)), initial=0.0) > SYMMETRY_RTOL * scale:
            raise ValueError("Coupling matrix rows must sum to zero")

        inertia.setflags(write=False)
        damping.setflags(write=False)
        object.__setattr__(self, "inertia", inertia)
        object.__setattr__(self, "damping", damping)
        object.__setattr__(self, "coupling", coupling)
        object.__setattr__(self, "dt", float(self.dt))

    @property
    def generators(self) -> int:
        return int(self.inertia.size)


@dataclass(frozen=True)
class MinimalityVerdict:
    """Numerical ranks of R(t) and O(t) against the state dimension."""

    rank_reachability: int
    rank_observability: int
    n: int
    horizon: int

    @property
    def is_minimal(self) -> bool:
        return self.rank_reachability == self.n and self.rank_observability == self.n


def _check_symmetric_psd(matrix: np.ndarray, what: str) -> None:
    scale = float(np.linalg.norm(matrix))
    if float(np.linalg.norm(matrix - matrix.T)) > SYMMETRY_RTOL * max(scale, 1e-300):
        raise ValueError(f"{what} is not symmetric")
    eigenvalues = np.linalg.eigvalsh(matrix)
    lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
    if lam_min < -PSD_RTOL * max(lam_max, 0.0):
        raise NotPositiveDefiniteError(what, lam_min, lam_max)


@dataclass(frozen=True, eq=False)
class GramianSet:
    """Finite-horizon controllability Gramian P and observability Gramian Q."""

    P: np.ndarray
    Q: np.ndarray
    t: int

    def __post_init__(self) -> None:
        P = _frozen_matrix(self.P, "P")
        n = P.shape[0]
        Q = _frozen_matrix(self.Q, "Q", (n, n))
        if P.shape != (n, n):
            raise DimensionMismatchError("P", (n, n), P.shape)
        _check_symmetric_psd(P, "Controllability Gramian P")
        _check_symmetric_psd(Q, "Observability Gramian Q")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return int(self.P.shape[0])


@dataclass(frozen=True)
class HankelSpectrum:
    """Hankel singular values in descending order."""

    values: tuple[float, ...]
    t: int

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if any(not np.isfinite(v) or v < 0 for v in values):
            raise ValueError("Hankel singular values must be finite and nonnegative")
        if any(a < b for a, b in zip(values, values[1:])):
            raise ValueError("Hankel singular values must be sorted in descending order")
        object.__setattr__(self, "values", values)


class Provenance(Enum):
    """Which synthesis path produced a schedule."""

    JOINT = "joint"
    SENSOR_ONLY = "sensor-only"
    ACTUATOR_ONLY = "actuator-only"
    SEPARATION = "separation"
    FULL = "full"


@dataclass(frozen=True)
class ScheduleBudgets:
    """
    Budgets a schedule was synthesized with, kept so it can be re-verified later.

    A side with ``kappa_* = None`` was not sparsified (every channel active at
    every step) and carries a theoretical epsilon of zero.
    """

    d_s: float | None = None
    d_a: float | None = None
    kappa_s: int | None = None
    kappa_a: int | None = None
    normalization: str = "proof"


@dataclass(frozen=True)
class Schedule:
    """
    Time-varying sensor and actuator scalings over a horizon of t steps.

    Attributes:
        t: Horizon length
        m: Number of actuators (inputs)
        p: Number of sensors (outputs)
        actuators: Strictly positive scalings keyed by (k, i), i < m
        sensors: Strictly positive scalings keyed by (k, i), i < p
        provenance: Synthesis path that produced the schedule
        budgets: Requested budgets and rounded sparsifier sizes, when known
    """

    t: int
    m: int
    p: int
    actuators: SchedulePairs = field(default_factory=dict)
    sensors: SchedulePairs = field(default_factory=dict)
    provenance: Provenance = Provenance.JOINT
    budgets: ScheduleBudgets | None = None

    def __post_init__(self) -> None:
        if self.t < 1 or self.m < 1 or self.p < 1:
            raise ScheduleError(f"t, m, p must be positive (got t={self.t}, m={self.m}, p={self.p})")
        object.__setattr__(self, "actuators", _clean_pairs(self.actuators, self.m, self.t, "actuator"))
        object.__setattr__(self, "sensors", _clean_pairs(self.sensors, self.p, self.t, "sensor"))

    def active_sets(self, side: str) -> list[set[int]]:
        """Active channel indices at each step k for ``side`` ("sensors" or "actuators")."""
        pairs = self._side(side)
        sets: list[set[int]] = [set() for _ in range(self.t)]
        for k, i in pairs:
            sets[k].add(i)
        return sets

    def is_full(self, side: str) -> bool:
        """True when every channel is active at every step with scaling exactly 1."""
        pairs = self._side(side)
        channels = self.p if side == "sensors" else self.m
        return len(pairs) == channels * self.t and all(v == 1.0 for v in pairs.values())

    def _side(self, side: str) -> SchedulePairs:
        if side == "sensors":
            return self.sensors
        if side == "actuators":
            return self.actuators
        raise ValueError(f"Unknown schedule side '{side}'")


def _clean_pairs(pairs: SchedulePairs, channels: int, t: int, what: str) -> SchedulePairs:
    cleaned: SchedulePairs = {}
    for (k, i), scale in sorted(pairs.items()):
        k, i, scale = int(k), int(i), float(scale)
        if not 0 <= k < t:
            raise ScheduleError(f"{what} time index {k} outside [0, {t})")
        if not 0 <= i < channels:
            raise ScheduleError(f"{what} channel index {i} outside [0, {channels})")
        if not np.isfinite(scale) or scale < 0:
            raise ScheduleError(f"{what} scaling at (k={k}, i={i}) must be finite and >= 0")
        if scale > SCALE_FLOOR:
            cleaned[(k, i)] = scale
    return cleaned
