"""
Certification of schedules against their sandwich bounds, plus systemic metrics.

A report carries three kinds of numbers:

- side factors: the smallest eps with e^{-eps} Q <= Q_s <= e^{eps} Q (sensors)
  and the same for P_s against P (actuators);
- joint factors: the largest |ln(sigma_i(H_s)^2 / sigma_i(H)^2)| over the Hankel
  singular values, and the Loewner factor between Q^{1/2} P Q^{1/2} and its
  scheduled counterpart;
- metric log-ratios |ln(rho(X_s) / rho(X))| for every registered metric.

Only the raw schedule is bound-checked. Values after the budget
normalization are reported next to them for comparison.
"""

import math
import threading
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from gramslice.config import MetricId, SchedulerOptions, WeightNormalization
from gramslice.constants import METRIC_SPOT_CHECKS
from gramslice.core.gramian_hankel import (
    factored_hankel_values,
    loewner_sandwich_epsilon,
    observability_matrix,
    reachability_matrix,
    spectral_log_epsilon,
    sym_sqrt,
    symmetrize,
    whiten,
)
from gramslice.core.scheduler import (
    average_cardinalities,
    normalize_schedule,
    pair_weights,
    scheduled_gramians,
)
from gramslice.core.sparsifier import sandwich_epsilon_bound
from gramslice.core.system_model import validate_minimal
from gramslice.exceptions import (
    BudgetError,
    DimensionMismatchError,
    MetricError,
    NearSingularGramianError,
    NonMinimalSystemError,
    ScheduleError,
)
from gramslice.logging import get_logger, log_bound_check
from gramslice.models import LtiSystem, Schedule

logger = get_logger(__name__)

MetricFunction = Callable[[np.ndarray], float]

_LOG_FORM_ATOL = 1e-10


def theoretical_epsilon(n: int, kappa: int) -> float:
    """
    2 atanh(sqrt(n / kappa)), the per-side factor certified for a budget kappa.

    Cross-checked against ln((sqrt(kappa) + sqrt(n)) / (sqrt(kappa) - sqrt(n))).
    """
    if kappa <= n:
        raise BudgetError(kappa, n, kappa)
    value = 2.0 * math.atanh(math.sqrt(n / kappa))
    root_k, root_n = math.sqrt(kappa), math.sqrt(n)
    log_form = math.log((root_k + root_n) / (root_k - root_n))
    if abs(value - log_form) > _LOG_FORM_ATOL * max(1.0, value):
        logger.warning(
            "atanh and log forms of the theoretical epsilon disagree",
            n=n,
            kappa=kappa,
            atanh_form=value,
            log_form=log_form,
        )
    return value


# -- systemic metrics --------------------------------------------------------


def _squared_hankel_norm(M: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(symmetrize(M))[-1])


def _trace(M: np.ndarray) -> float:
    return float(np.trace(M))


_registry_lock = threading.Lock()
_METRICS: dict[str, MetricFunction] = {
    MetricId.SQUARED_HANKEL_NORM.value: _squared_hankel_norm,
    MetricId.TRACE.value: _trace,
}


def _random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    G = rng.standard_normal((n, n))
    return G @ G.T + 1e-3 * np.eye(n)


def spot_check_metric(
    name: str, fn: MetricFunction, seed: int = 0, checks: int = METRIC_SPOT_CHECKS, n: int = 4
) -> None:
    """
    Randomized checks that ``fn`` is positive, homogeneous of degree one and
    Loewner-monotone. Raises MetricError on the first failure.
    """
    rng = np.random.default_rng(seed)
    for _ in range(checks):
        M = _random_psd(rng, n)
        base = float(fn(M))
        if not math.isfinite(base) or base <= 0.0:
            raise MetricError(name, f"non-positive value {base!r} on a positive definite matrix")

        c = float(rng.uniform(0.1, 10.0))
        scaled = float(fn(c * M))
        if abs(scaled - c * base) > 1e-9 * c * base:
            raise MetricError(name, f"not homogeneous: rho({c:.3g} M) = {scaled:.6g}, expected {c * base:.6g}")

        larger = float(fn(M + _random_psd(rng, n)))
        if larger < base * (1.0 - 1e-12):
            raise MetricError(name, f"not monotone: rho(M + E) = {larger:.6g} < rho(M) = {base:.6g}")


def register_metric(name: str, fn: MetricFunction, seed: int = 0) -> None:
    """Add a user metric after it passes the randomized spot checks."""
    spot_check_metric(name, fn, seed=seed)
    with _registry_lock:
        _METRICS[name] = fn
    logger.debug("Registered metric", metric=name)


def registered_metrics() -> list[str]:
    with _registry_lock:
        return list(_METRICS)


def _metric_function(metric_id: MetricId | str) -> tuple[str, MetricFunction]:
    name = metric_id.value if isinstance(metric_id, MetricId) else str(metric_id)
    with _registry_lock:
        fn = _METRICS.get(name)
    if fn is None:
        raise MetricError(name, f"unknown metric; registered: {', '.join(registered_metrics())}")
    return name, fn


def metric_log_ratio(metric_id: MetricId | str, M: np.ndarray, M_s: np.ndarray) -> float:
    """
    |ln(rho(M_s) / rho(M))|.

    For a homogeneous monotone rho and e^{-eps} M <= M_s <= e^{eps} M the
    result is at most eps.
    """
    name, fn = _metric_function(metric_id)
    M = np.asarray(M, dtype=float)
    M_s = np.asarray(M_s, dtype=float)
    if M.shape != M_s.shape:
        raise DimensionMismatchError("metric operands", M.shape, M_s.shape)
    reference, scheduled = float(fn(M)), float(fn(M_s))
    if not reference > 0.0:
        raise MetricError(name, f"reference value {reference!r} is not positive")
    if not scheduled > 0.0:
        raise MetricError(name, f"scheduled value {scheduled!r} is not positive")
    return abs(math.log(scheduled / reference))


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedEpsilons:
    """Empirical factors of the schedule after rescaling to sum s^2 = n d_s, sum a^2 = n d_a."""

    d_s: float | None
    d_a: float | None
    epsilon_sensors: float
    epsilon_actuators: float
    epsilon_hankel: float
    hankel_log_error: float


@dataclass(frozen=True)
class VerificationReport:
    """
    Certified and empirical approximation factors of one schedule.

    Field order is the serialization order.
    """

    provenance: str
    t: int
    n: int
    m: int
    p: int
    normalization: str
    d_s_requested: float | None
    d_a_requested: float | None
    d_s_achieved: float
    d_a_achieved: float
    sensor_pairs: int
    actuator_pairs: int
    kappa_s: int | None
    kappa_a: int | None
    epsilon_theory_sensors: float
    epsilon_theory_actuators: float
    epsilon_theory_joint: float
    epsilon_sensors: float
    epsilon_actuators: float
    epsilon_hankel: float
    epsilon_joint: float
    hankel_norm: float
    hankel_norm_scheduled: float
    hankel_log_error: float
    hankel_value_ratios: tuple[float, ...]
    metric_log_ratios: dict[str, float]
    normalized: NormalizedEpsilons | None
    sensors_pass: bool
    actuators_pass: bool
    joint_pass: bool
    joint_sandwich_within_bound: bool
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        """True when every certified bound holds (side bounds and the Hankel spectrum bound)."""
        return self.sensors_pass and self.actuators_pass and self.joint_pass

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {}
        for name in self.__dataclass_fields__:
            value = getattr(self, name)
            if isinstance(value, NormalizedEpsilons):
                value = {key: getattr(value, key) for key in value.__dataclass_fields__}
            elif isinstance(value, tuple):
                value = list(value)
            elif isinstance(value, dict):
                value = dict(value)
            data[name] = value
        data["passed"] = self.passed
        return data

    def format_report(self) -> str:
        def fmt(value: float) -> str:
            return f"{value:.6g}" if math.isfinite(value) else "inf"

        def flag(ok: bool) -> str:
            return "ok" if ok else "VIOLATED"

        lines = ["=" * 80, f"SCHEDULE VERIFICATION ({self.provenance})", "=" * 80, ""]
        lines.append(f"System:     n={self.n}, m={self.m}, p={self.p}, t={self.t}")
        lines.append(
            f"Sensors:    {self.sensor_pairs} pairs, d_s achieved {self.d_s_achieved:.4g}"
            + (f" (requested {self.d_s_requested:g})" if self.d_s_requested is not None else "")
        )
        lines.append(
            f"Actuators:  {self.actuator_pairs} pairs, d_a achieved {self.d_a_achieved:.4g}"
            + (f" (requested {self.d_a_requested:g})" if self.d_a_requested is not None else "")
        )
        lines.append("")
        lines.append("Bounds (empirical <= theory):")
        lines.append(
            f"  sensors    {fmt(self.epsilon_sensors):>12} <= {fmt(self.epsilon_theory_sensors):>12}"
            f"  {flag(self.sensors_pass)}"
        )
        lines.append(
            f"  actuators  {fmt(self.epsilon_actuators):>12} <= {fmt(self.epsilon_theory_actuators):>12}"
            f"  {flag(self.actuators_pass)}"
        )
        lines.append(
            f"  hankel     {fmt(self.epsilon_hankel):>12} <= {fmt(self.epsilon_theory_joint):>12}"
            f"  {flag(self.joint_pass)}"
        )
        lines.append(f"  loewner    {fmt(self.epsilon_joint):>12}  (advisory)")
        lines.append("")
        lines.append(
            f"Hankel norm: {fmt(self.hankel_norm)} -> {fmt(self.hankel_norm_scheduled)}"
            f"  |log ratio| {fmt(self.hankel_log_error)}"
        )
        for name, value in self.metric_log_ratios.items():
            lines.append(f"  metric {name:24s} |log ratio| {fmt(value)}")
        if self.normalized is not None:
            lines.append("")
            lines.append("After normalization (not bound-checked):")
            lines.append(
                f"  sensors {fmt(self.normalized.epsilon_sensors)}, "
                f"actuators {fmt(self.normalized.epsilon_actuators)}, "
                f"hankel {fmt(self.normalized.epsilon_hankel)}, "
                f"log error {fmt(self.normalized.hankel_log_error)}"
            )
        for note in self.notes:
            lines.append(f"Note: {note}")
        lines.append("")
        lines.append(f"Result: {'PASS' if self.passed else 'FAIL'}")
        lines.append("=" * 80)
        return "\n".join(lines)


# -- measurement ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Measurement:
    epsilon_sensors: float
    epsilon_actuators: float
    epsilon_hankel: float
    hankel_values: np.ndarray
    X_s: np.ndarray | None


class _VerificationContext:
    """Matrices of the full system at horizon t, shared by the raw and normalized measurements."""

    def __init__(self, system: LtiSystem, t: int, options: SchedulerOptions):
        tolerances = options.tolerances
        self.system = system
        self.t = t
        self.options = options
        self.tolerances = tolerances
        self.R = reachability_matrix(system, t, tolerances)
        self.O = observability_matrix(system, t, tolerances)
        self.sensor_family = whiten(self.O.T, tolerances, what="observability Gramian Q")
        self.actuator_family = whiten(self.R, tolerances, what="controllability Gramian P")
        self.hankel_values = factored_hankel_values(self.O, self.R)
        P = symmetrize(self.R @ self.R.T)
        Q = symmetrize(self.O.T @ self.O)
        Q_half = sym_sqrt(Q, tolerances)
        self.X = symmetrize(Q_half @ P @ Q_half)

    @staticmethod
    def _family_epsilon(family: np.ndarray, weights: np.ndarray) -> float:
        # family is Q^{-1/2} O^T (or P^{-1/2} R), so this is the Q_s (P_s) sandwich
        eigenvalues = np.linalg.eigvalsh(symmetrize((family * weights) @ family.T))
        lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
        if lam_min <= 0.0:
            return math.inf
        return max(math.log(lam_max), -math.log(lam_min))

    def measure(self, schedule: Schedule, with_matrix: bool) -> _Measurement:
        system, t = self.system, self.t
        s = pair_weights(schedule.sensors, t, system.p)
        a = pair_weights(schedule.actuators, t, system.m)

        epsilon_sensors = 0.0 if schedule.is_full("sensors") else self._family_epsilon(self.sensor_family, s)
        epsilon_actuators = (
            0.0 if schedule.is_full("actuators") else self._family_epsilon(self.actuator_family, a)
        )

        values = factored_hankel_values(np.sqrt(s)[:, None] * self.O, self.R * np.sqrt(a))
        epsilon_hankel = spectral_log_epsilon(self.hankel_values**2, values**2)

        X_s = None
        if with_matrix:
            g_s = scheduled_gramians(system, schedule, self.options)
            Q_s_half = sym_sqrt(g_s.Q, self.tolerances)
            X_s = symmetrize(Q_s_half @ g_s.P @ Q_s_half)
        return _Measurement(epsilon_sensors, epsilon_actuators, epsilon_hankel, values, X_s)


def _log_error(reference: float, scheduled: float) -> float:
    if scheduled <= 0.0:
        return math.inf
    return abs(math.log(scheduled / reference))


def _side_theory(schedule: Schedule, side: str, n: int, notes: list[str]) -> tuple[int | None, float]:
    if schedule.is_full(side):
        return None, 0.0
    budgets = schedule.budgets
    kappa = None
    normalization = WeightNormalization.PROOF
    if budgets is not None:
        kappa = budgets.kappa_s if side == "sensors" else budgets.kappa_a
        normalization = WeightNormalization(budgets.normalization)
    if kappa is None:
        # Without a recorded budget the pair count is the tightest kappa that is surely valid.
        kappa = len(schedule.sensors if side == "sensors" else schedule.actuators)
        notes.append(f"{side} budget not recorded; kappa inferred from {kappa} active pairs")
    if kappa <= n:
        return kappa, math.inf
    return kappa, sandwich_epsilon_bound(n, kappa, normalization)


def verify_schedule(
    system: LtiSystem,
    schedule: Schedule,
    options: SchedulerOptions | None = None,
    metrics: list[MetricId | str] | None = None,
) -> VerificationReport:
    """
    Measure a schedule against the full system and certify its bounds.

    Raises:
        DimensionMismatchError: If the schedule's channel counts differ from the system's
        NonMinimalSystemError: If R(t) or O(t) is rank deficient
    """
    options = options if options is not None else SchedulerOptions()
    tolerances = options.tolerances
    if schedule.m != system.m:
        raise DimensionMismatchError("schedule actuator count", system.m, schedule.m)
    if schedule.p != system.p:
        raise DimensionMismatchError("schedule sensor count", system.p, schedule.p)

    t, n = schedule.t, system.n
    verdict = validate_minimal(system, t, tolerances)
    if not verdict.is_minimal:
        raise NonMinimalSystemError(verdict.rank_reachability, verdict.rank_observability, n, t)

    context = _VerificationContext(system, t, options)
    raw = context.measure(schedule, with_matrix=True)

    notes: list[str] = []
    kappa_s, theory_s = _side_theory(schedule, "sensors", n, notes)
    kappa_a, theory_a = _side_theory(schedule, "actuators", n, notes)
    theory_joint = theory_s + theory_a

    assert raw.X_s is not None
    try:
        epsilon_joint = loewner_sandwich_epsilon(context.X, raw.X_s, tolerances)
    except NearSingularGramianError as e:
        notes.append(f"Loewner factor unavailable: {e}")
        epsilon_joint = math.inf

    hankel_norm = float(context.hankel_values[0])
    hankel_norm_scheduled = float(raw.hankel_values[0])
    ratios = tuple(
        float(s / f) if f > 0 else math.inf
        for s, f in zip(raw.hankel_values, context.hankel_values)
    )

    metric_ratios: dict[str, float] = {}
    for metric in metrics or registered_metrics():
        name, _ = _metric_function(metric)
        try:
            metric_ratios[name] = metric_log_ratio(name, context.X, raw.X_s)
        except MetricError as e:
            logger.warning("Metric ratio undefined", metric=name, reason=e.reason)
            metric_ratios[name] = math.inf

    d_s_achieved, d_a_achieved = average_cardinalities(schedule)
    budgets = schedule.budgets
    d_s_requested = budgets.d_s if budgets is not None else None
    d_a_requested = budgets.d_a if budgets is not None else None

    normalized = None
    targets = (
        None if schedule.is_full("sensors") else (d_s_requested or d_s_achieved),
        None if schedule.is_full("actuators") else (d_a_requested or d_a_achieved),
    )
    if targets != (None, None):
        try:
            rescaled = normalize_schedule(schedule, targets[0], targets[1], n)
        except ScheduleError as e:
            notes.append(str(e))
        else:
            post = context.measure(rescaled, with_matrix=False)
            normalized = NormalizedEpsilons(
                d_s=targets[0],
                d_a=targets[1],
                epsilon_sensors=post.epsilon_sensors,
                epsilon_actuators=post.epsilon_actuators,
                epsilon_hankel=post.epsilon_hankel,
                hankel_log_error=_log_error(hankel_norm, float(post.hankel_values[0])),
            )

    atol = tolerances.bound_atol
    sensors_pass = raw.epsilon_sensors <= theory_s + atol
    actuators_pass = raw.epsilon_actuators <= theory_a + atol
    joint_pass = raw.epsilon_hankel <= theory_joint + atol
    joint_sandwich_within_bound = epsilon_joint <= theory_joint + atol
    log_bound_check(logger, "sensors", raw.epsilon_sensors, theory_s, sensors_pass)
    log_bound_check(logger, "actuators", raw.epsilon_actuators, theory_a, actuators_pass)
    log_bound_check(logger, "hankel", raw.epsilon_hankel, theory_joint, joint_pass)
    if not joint_sandwich_within_bound:
        logger.warning(
            "Loewner factor of Q^1/2 P Q^1/2 exceeds eps_s + eps_a",
            epsilon_joint=epsilon_joint,
            theory=theory_joint,
        )

    return VerificationReport(
        provenance=schedule.provenance.value,
        t=t,
        n=n,
        m=system.m,
        p=system.p,
        normalization=budgets.normalization if budgets is not None else "proof",
        d_s_requested=d_s_requested,
        d_a_requested=d_a_requested,
        d_s_achieved=d_s_achieved,
        d_a_achieved=d_a_achieved,
        sensor_pairs=len(schedule.sensors),
        actuator_pairs=len(schedule.actuators),
        kappa_s=kappa_s,
        kappa_a=kappa_a,
        epsilon_theory_sensors=theory_s,
        epsilon_theory_actuators=theory_a,
        epsilon_theory_joint=theory_joint,
        epsilon_sensors=raw.epsilon_sensors,
        epsilon_actuators=raw.epsilon_actuators,
        epsilon_hankel=raw.epsilon_hankel,
        epsilon_joint=epsilon_joint,
        hankel_norm=hankel_norm,
        hankel_norm_scheduled=hankel_norm_scheduled,
        hankel_log_error=_log_error(hankel_norm, hankel_norm_scheduled),
        hankel_value_ratios=ratios,
        metric_log_ratios=metric_ratios,
        normalized=normalized,
        sensors_pass=sensors_pass,
        actuators_pass=actuators_pass,
        joint_pass=joint_pass,
        joint_sandwich_within_bound=joint_sandwich_within_bound,
        notes=tuple(notes),
    )
