"""
Sensor and actuator schedules built from sparsifier weights.

Column c of R(t) is A^i b_j with c = i*m + j, and column c of O(t)^T is
(c_j A^i)^T with c = i*p + j. A weight on either column becomes the squared
scaling of channel j at schedule time k = t - i - 1, which is what makes

    P_s = sum_k sum_j a_j(k)^2 (A^{t-k-1} b_j)(A^{t-k-1} b_j)^T

reproduce the weighted sum the sparsifier certified.
"""

import math
from collections.abc import Callable

import numpy as np

from gramslice.config import (
    CandidateVariant,
    ScheduleMode,
    SchedulerOptions,
    Tolerances,
)
from gramslice.constants import BUDGET_ROUNDING_WARN_RATIO
from gramslice.core.gramian_hankel import (
    observability_matrix,
    reachability_matrix,
    sym_sqrt,
    symmetrize,
    whiten,
)
from gramslice.core.sparsifier import (
    IterationRecord,
    SparsifyResult,
    bss_pass,
    gen_dual_set,
)
from gramslice.exceptions import BudgetError, DimensionMismatchError, HorizonError, ScheduleError
from gramslice.logging import get_logger, log_schedule_complete, log_schedule_start
from gramslice.models import (
    GramianSet,
    LtiSystem,
    Provenance,
    Schedule,
    ScheduleBudgets,
    SchedulePairs,
)

logger = get_logger(__name__)

TraceCallback = Callable[[str, IterationRecord], None]
# Receives ("sensors" | "actuators", record) for every sparsifier step.

_DEFAULT_OPTIONS = SchedulerOptions()


def resolve_budget(d: float, t: int, n: int, channels: int, side: str) -> int | None:
    """
    kappa = floor(d t), or None when d >= channels (every channel kept at every step).

    Warns when flooring moves the theoretical epsilon by more than 1%.
    """
    if d <= 0:
        raise BudgetError(0, n, channels * t, side)
    if d >= channels:
        return None
    kappa = math.floor(d * t)
    if kappa <= n:
        raise BudgetError(kappa, n, channels * t, side)
    exact = 2.0 * math.atanh(math.sqrt(n / (d * t)))
    rounded = 2.0 * math.atanh(math.sqrt(n / kappa))
    if abs(rounded - exact) > BUDGET_ROUNDING_WARN_RATIO * exact:
        logger.warning(
            "Budget rounding changes theoretical epsilon by more than 1%",
            side=side,
            d=d,
            t=t,
            kappa=kappa,
            epsilon_exact=exact,
            epsilon_rounded=rounded,
        )
    return kappa


def _check_horizon(system: LtiSystem, t: int) -> None:
    if t < system.n:
        raise HorizonError(t, system.n, "horizon assumption t >= n")


def weights_to_pairs(weights: np.ndarray, t: int, channels: int, floor: float) -> SchedulePairs:
    """Column weight (power i, channel j) -> scaling sqrt(w) at time t - i - 1."""
    pairs: SchedulePairs = {}
    for column in np.flatnonzero(weights > floor):
        i, j = divmod(int(column), channels)
        scale = math.sqrt(float(weights[column]))
        if scale > floor:
            pairs[(t - i - 1, j)] = scale
    return pairs


def full_pairs(t: int, channels: int) -> SchedulePairs:
    return {(k, i): 1.0 for k in range(t) for i in range(channels)}


def _report_pass(side: str, result: SparsifyResult, trace: TraceCallback | None) -> None:
    logger.debug(
        "Sparsifier pass complete",
        side=side,
        kappa=result.kappa,
        selected=result.selected_count,
        epsilon_theory=result.epsilon_theory,
    )
    if trace is not None:
        for entry in result.trace:
            trace(side, entry)


def full_schedule(system: LtiSystem, t: int) -> Schedule:
    """Every sensor and actuator active at every step with scaling 1."""
    return Schedule(
        t=t,
        m=system.m,
        p=system.p,
        actuators=full_pairs(t, system.m),
        sensors=full_pairs(t, system.p),
        provenance=Provenance.FULL,
        budgets=ScheduleBudgets(d_s=float(system.p), d_a=float(system.m)),
    )


def sensor_schedule(
    system: LtiSystem,
    t: int,
    d_s: float,
    options: SchedulerOptions = _DEFAULT_OPTIONS,
    trace: TraceCallback | None = None,
) -> Schedule:
    """
    Sparsify the isotropic family Q^{-1/2} (c_j A^i)^T; actuators stay fully on.

    The result satisfies e^{-eps} Q <= Q_s <= e^{eps} Q with
    eps <= 2 atanh(sqrt(n / floor(d_s t))).
    """
    _check_horizon(system, t)
    tolerances = options.tolerances
    kappa = resolve_budget(d_s, t, system.n, system.p, "sensor")
    if kappa is None:
        sensors = full_pairs(t, system.p)
    else:
        O = observability_matrix(system, t, tolerances)  # noqa: E741
        candidates = whiten(O.T, tolerances, what="observability Gramian Q")
        result = bss_pass(candidates, kappa, options.normalization, tolerances)
        _report_pass("sensors", result, trace)
        sensors = weights_to_pairs(result.weights, t, system.p, tolerances.scale_floor)

    return Schedule(
        t=t,
        m=system.m,
        p=system.p,
        actuators=full_pairs(t, system.m),
        sensors=sensors,
        provenance=Provenance.SENSOR_ONLY,
        budgets=ScheduleBudgets(
            d_s=d_s, d_a=float(system.m), kappa_s=kappa, normalization=options.normalization.value
        ),
    )


def actuator_schedule(
    system: LtiSystem,
    t: int,
    d_a: float,
    options: SchedulerOptions = _DEFAULT_OPTIONS,
    trace: TraceCallback | None = None,
) -> Schedule:
    """
    Sensor scheduling on the dual system (A^T, C^T, B^T) with the roles swapped back.

    Sparsifies P^{-1/2} A^i b_j, so e^{-eps} P <= P_s <= e^{eps} P.
    """

    def dual_trace(side: str, entry: IterationRecord) -> None:
        if trace is not None:
            trace("actuators", entry)

    dual = sensor_schedule(system.dual(), t, d_a, options, dual_trace if trace else None)
    budgets = dual.budgets or ScheduleBudgets()
    return Schedule(
        t=t,
        m=system.m,
        p=system.p,
        actuators=dual.sensors,
        sensors=dual.actuators,
        provenance=Provenance.ACTUATOR_ONLY,
        budgets=ScheduleBudgets(
            d_s=float(system.p),
            d_a=d_a,
            kappa_a=budgets.kappa_s,
            normalization=budgets.normalization,
        ),
    )


def _joint_candidates(
    system: LtiSystem, t: int, variant: CandidateVariant, tolerances: Tolerances
) -> tuple[np.ndarray, np.ndarray]:
    # Returns (V, U): V sums to a positive definite X, U is already isotropic.
    R = reachability_matrix(system, t, tolerances)
    O = observability_matrix(system, t, tolerances)  # noqa: E741
    if variant is CandidateVariant.LISTING:
        P = symmetrize(R @ R.T)
        V = sym_sqrt(P, tolerances) @ O.T
        U = whiten(R, tolerances, what="controllability Gramian P")
    else:
        Q = symmetrize(O.T @ O)
        V = Q @ R
        U = whiten(O.T, tolerances, what="observability Gramian Q")
    return V, U


def joint_schedule(
    system: LtiSystem,
    t: int,
    d_s: float,
    d_a: float,
    options: SchedulerOptions = _DEFAULT_OPTIONS,
    trace: TraceCallback | None = None,
) -> Schedule:
    """
    Joint sensor/actuator schedule from one dual-set sparsification.

    PROOF variant: V columns Q A^i b_j (X = Q P Q) give the actuator weights
    with kappa_a = floor(d_a t); U columns Q^{-1/2} (c_j A^i)^T give the sensor
    weights with kappa_s = floor(d_s t). LISTING variant swaps the roles
    around X = P^{1/2} Q P^{1/2}. Either way the Hankel singular values of the
    scheduled system stay within e^{±(eps_s + eps_a)} of the original ones.

    A side whose budget reaches its channel count is kept fully on.
    """
    _check_horizon(system, t)
    tolerances = options.tolerances
    kappa_s = resolve_budget(d_s, t, system.n, system.p, "sensor")
    kappa_a = resolve_budget(d_a, t, system.n, system.m, "actuator")
    log_schedule_start(logger, "joint", system.n, t, d_s, d_a)

    if kappa_s is None or kappa_a is None:
        # At least one side is full; the other is a single-sided pass.
        if kappa_s is None and kappa_a is None:
            sensors, actuators = full_pairs(t, system.p), full_pairs(t, system.m)
        elif kappa_s is None:
            actuators = actuator_schedule(system, t, d_a, options, trace).actuators
            sensors = full_pairs(t, system.p)
        else:
            sensors = sensor_schedule(system, t, d_s, options, trace).sensors
            actuators = full_pairs(t, system.m)
    else:
        V, U = _joint_candidates(system, t, options.variant, tolerances)
        if options.variant is CandidateVariant.LISTING:
            kappa_v, kappa_u = kappa_s, kappa_a
            v_side, u_side = "sensors", "actuators"
        else:
            kappa_v, kappa_u = kappa_a, kappa_s
            v_side, u_side = "actuators", "sensors"

        result = gen_dual_set(V, U, kappa_v, kappa_u, options.normalization, tolerances)
        _report_pass(v_side, result.v_pass, trace)
        _report_pass(u_side, result.u_pass, trace)
        channels = {"sensors": system.p, "actuators": system.m}
        pairs = {
            v_side: weights_to_pairs(result.s, t, channels[v_side], tolerances.scale_floor),
            u_side: weights_to_pairs(result.r, t, channels[u_side], tolerances.scale_floor),
        }
        sensors, actuators = pairs["sensors"], pairs["actuators"]

    schedule = Schedule(
        t=t,
        m=system.m,
        p=system.p,
        actuators=actuators,
        sensors=sensors,
        provenance=Provenance.JOINT,
        budgets=ScheduleBudgets(
            d_s=d_s,
            d_a=d_a,
            kappa_s=kappa_s,
            kappa_a=kappa_a,
            normalization=options.normalization.value,
        ),
    )
    log_schedule_complete(logger, "joint", len(schedule.sensors), len(schedule.actuators))
    return schedule


def separation_schedule(
    system: LtiSystem,
    t: int,
    d_s: float,
    d_a: float,
    options: SchedulerOptions = _DEFAULT_OPTIONS,
    trace: TraceCallback | None = None,
) -> Schedule:
    """
    Independent sensor-only and actuator-only schedules, merged.

    Each side keeps its own certificate; the merged schedule satisfies the
    joint bound with eps <= eps_s + eps_a.
    """
    log_schedule_start(logger, "separation", system.n, t, d_s, d_a)
    sensor_side = sensor_schedule(system, t, d_s, options, trace)
    actuator_side = actuator_schedule(system, t, d_a, options, trace)
    sensor_budgets = sensor_side.budgets or ScheduleBudgets()
    actuator_budgets = actuator_side.budgets or ScheduleBudgets()
    schedule = Schedule(
        t=t,
        m=system.m,
        p=system.p,
        actuators=actuator_side.actuators,
        sensors=sensor_side.sensors,
        provenance=Provenance.SEPARATION,
        budgets=ScheduleBudgets(
            d_s=d_s,
            d_a=d_a,
            kappa_s=sensor_budgets.kappa_s,
            kappa_a=actuator_budgets.kappa_a,
            normalization=options.normalization.value,
        ),
    )
    log_schedule_complete(logger, "separation", len(schedule.sensors), len(schedule.actuators))
    return schedule


def build_schedule(
    system: LtiSystem,
    t: int,
    mode: ScheduleMode,
    d_s: float | None,
    d_a: float | None,
    options: SchedulerOptions = _DEFAULT_OPTIONS,
    trace: TraceCallback | None = None,
) -> Schedule:
    """Dispatch on ``mode``; a budget the mode does not use may be None."""
    if mode is ScheduleMode.FULL:
        _check_horizon(system, t)
        return full_schedule(system, t)
    if mode in (ScheduleMode.JOINT, ScheduleMode.SEPARATION, ScheduleMode.SENSOR) and d_s is None:
        raise BudgetError(0, system.n, system.p * t, "sensor")
    if mode in (ScheduleMode.JOINT, ScheduleMode.SEPARATION, ScheduleMode.ACTUATOR) and d_a is None:
        raise BudgetError(0, system.n, system.m * t, "actuator")

    if mode is ScheduleMode.JOINT:
        return joint_schedule(system, t, d_s, d_a, options, trace)  # type: ignore[arg-type]
    if mode is ScheduleMode.SEPARATION:
        return separation_schedule(system, t, d_s, d_a, options, trace)  # type: ignore[arg-type]
    if mode is ScheduleMode.SENSOR:
        return sensor_schedule(system, t, d_s, options, trace)  # type: ignore[arg-type]
    return actuator_schedule(system, t, d_a, options, trace)  # type: ignore[arg-type]


def pair_weights(pairs: SchedulePairs, t: int, channels: int) -> np.ndarray:
    """Squared scalings laid out along the columns of R(t) (or O(t)^T)."""
    weights = np.zeros(t * channels)
    for (k, j), scale in pairs.items():
        weights[(t - k - 1) * channels + j] = scale * scale
    return weights


def _check_schedule_dimensions(system: LtiSystem, schedule: Schedule) -> None:
    if schedule.m != system.m:
        raise DimensionMismatchError("schedule actuator count", system.m, schedule.m)
    if schedule.p != system.p:
        raise DimensionMismatchError("schedule sensor count", system.p, schedule.p)


def scheduled_gramians(
    system: LtiSystem, schedule: Schedule, options: SchedulerOptions = _DEFAULT_OPTIONS
) -> GramianSet:
    """
    P_s = sum_k sum_j a_j(k)^2 (A^{t-k-1} b_j)(...)^T and
    Q_s = sum_k sum_j s_j(k)^2 (c_j A^{t-k-1})^T (...).
    """
    _check_schedule_dimensions(system, schedule)
    t = schedule.t
    R = reachability_matrix(system, t, options.tolerances)
    O = observability_matrix(system, t, options.tolerances)  # noqa: E741
    a = pair_weights(schedule.actuators, t, system.m)
    s = pair_weights(schedule.sensors, t, system.p)
    return GramianSet(P=symmetrize((R * a) @ R.T), Q=symmetrize((O.T * s) @ O), t=t)


def average_cardinalities(schedule: Schedule) -> tuple[float, float]:
    """(average active sensors per step, average active actuators per step)."""
    return len(schedule.sensors) / schedule.t, len(schedule.actuators) / schedule.t


def normalize_schedule(schedule: Schedule, d_s: float | None, d_a: float | None, n: int) -> Schedule:
    """
    Rescale each side uniformly so that sum s^2 = n d_s and sum a^2 = n d_a.

    A side with budget None is left untouched. The sparsity pattern never changes.
    """

    def rescale(pairs: SchedulePairs, d: float | None, side: str) -> SchedulePairs:
        if d is None:
            return dict(pairs)
        total = sum(scale * scale for scale in pairs.values())
        if total <= 0.0:
            raise ScheduleError(f"cannot normalize {side}: no positive scaling")
        factor = math.sqrt(n * d / total)
        return {key: scale * factor for key, scale in pairs.items()}

    return Schedule(
        t=schedule.t,
        m=schedule.m,
        p=schedule.p,
        actuators=rescale(schedule.actuators, d_a, "actuators"),
        sensors=rescale(schedule.sensors, d_s, "sensors"),
        provenance=schedule.provenance,
        budgets=schedule.budgets,
    )
