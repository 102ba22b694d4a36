"""System construction: minimality checks, swing-equation networks and zero-order-hold discretization."""

import numpy as np
from scipy.linalg import expm

from gramslice.config import DEFAULT_TOLERANCES, Tolerances
from gramslice.constants import (
    DEFAULT_RANDOM_SPECTRAL_RADIUS,
    DEFAULT_SAMPLING_INTERVAL,
    DEFAULT_SWING_SEED,
)
from gramslice.core.gramian_hankel import numerical_rank, observability_matrix, reachability_matrix
from gramslice.exceptions import DimensionMismatchError, DiscretizationError, HorizonError
from gramslice.logging import get_logger
from gramslice.models import LtiSystem, MinimalityVerdict, SwingParams

logger = get_logger(__name__)


def validate_minimal(
    system: LtiSystem, t: int, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> MinimalityVerdict:
    """Numerical ranks of R(t) and O(t); the system is minimal iff both equal n."""
    if t < system.n:
        raise HorizonError(t, system.n, "minimality needs t >= n")
    R = reachability_matrix(system, t, tolerances)
    O = observability_matrix(system, t, tolerances)  # noqa: E741
    verdict = MinimalityVerdict(
        rank_reachability=numerical_rank(R, tolerances.rank_rtol),
        rank_observability=numerical_rank(O, tolerances.rank_rtol),
        n=system.n,
        horizon=t,
    )
    logger.debug(
        "Minimality check",
        rank_reachability=verdict.rank_reachability,
        rank_observability=verdict.rank_observability,
        n=system.n,
        t=t,
    )
    return verdict


def swing_to_continuous(params: SwingParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Linearized swing dynamics with state (theta, omega):

        A_c = [[0, I], [-M^{-1} L, -M^{-1} D]],  B_c = [[0], [M^{-1}]],  C = I_{2g}
    """
    g = params.generators
    inv_inertia = 1.0 / params.inertia
    zeros = np.zeros((g, g))
    A_c = np.block(
        [
            [zeros, np.eye(g)],
            [-inv_inertia[:, None] * params.coupling, -np.diag(inv_inertia * params.damping)],
        ]
    )
    B_c = np.vstack([zeros, np.diag(inv_inertia)])
    return A_c, B_c, np.eye(2 * g)


def discretize_zoh(A_c: np.ndarray, B_c: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Zero-order hold: A = exp(A_c h), B = (int_0^h exp(A_c s) ds) B_c.

    Both come from one matrix exponential of the augmented matrix
    [[A_c, B_c], [0, 0]] h (scipy's scaling-and-squaring Pade).
    """
    A_c = np.asarray(A_c, dtype=float)
    B_c = np.asarray(B_c, dtype=float)
    if not h > 0:
        raise ValueError(f"Sampling interval must be positive, got {h}")
    n = A_c.shape[0]
    if A_c.shape != (n, n) or B_c.shape[0] != n:
        raise DimensionMismatchError(
            "continuous-time pair", f"({n}, {n}) and ({n}, m)", (A_c.shape, B_c.shape)
        )
    m = B_c.shape[1]

    augmented = np.zeros((n + m, n + m))
    augmented[:n, :n] = A_c * h
    augmented[:n, n:] = B_c * h
    with np.errstate(over="ignore", invalid="ignore"):
        exponential = expm(augmented)
    if not np.all(np.isfinite(exponential)):
        raise DiscretizationError(
            f"matrix exponential overflowed for h*||A_c|| = {h * np.linalg.norm(A_c, 2):.3g}"
        )
    return exponential[:n, :n], exponential[:n, n:]


def swing_system(params: SwingParams) -> LtiSystem:
    """Discretized swing network: n = 2g states, m = g inputs, p = 2g outputs."""
    A_c, B_c, C = swing_to_continuous(params)
    A, B = discretize_zoh(A_c, B_c, params.dt)
    g = params.generators
    return LtiSystem(
        A=A,
        B=B,
        C=C,
        input_labels=tuple(f"u{i + 1}" for i in range(g)),
        output_labels=tuple(f"theta{i + 1}" for i in range(g))
        + tuple(f"omega{i + 1}" for i in range(g)),
    )


def random_swing_params(
    generators: int, seed: int = DEFAULT_SWING_SEED, dt: float = DEFAULT_SAMPLING_INTERVAL
) -> SwingParams:
    """
    Seeded swing parameters: inertia in [2, 10], damping in [0.5, 2], and a
    ring of couplings in [0.5, 1.5] plus one random chord per generator.
    """
    if generators < 1:
        raise ValueError("At least one generator is required")
    rng = np.random.default_rng(seed)
    inertia = rng.uniform(2.0, 10.0, generators)
    damping = rng.uniform(0.5, 2.0, generators)
    weights = np.zeros((generators, generators))
    if generators > 1:
        for i in range(generators):
            j = (i + 1) % generators
            if i != j:
                weights[i, j] = weights[j, i] = rng.uniform(0.5, 1.5)
        for i in range(generators):
            j = int(rng.integers(generators))
            if j != i:
                weights[i, j] = weights[j, i] = rng.uniform(0.5, 1.5)
    coupling = np.diag(weights.sum(axis=1)) - weights
    return SwingParams(inertia=inertia, damping=damping, coupling=coupling, dt=dt)


def random_system(
    n: int,
    m: int,
    p: int,
    seed: int,
    spectral_radius: float = DEFAULT_RANDOM_SPECTRAL_RADIUS,
) -> LtiSystem:
    """
    Seeded random system: standard normal A rescaled to the given spectral
    radius, standard normal B and C. Minimal with probability one.
    """
    if min(n, m, p) < 1:
        raise ValueError("n, m and p must all be positive")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    radius = float(np.max(np.abs(np.linalg.eigvals(A))))
    if radius > 0:
        A *= spectral_radius / radius
    B = rng.standard_normal((n, m))
    C = rng.standard_normal((p, n))
    return LtiSystem(A=A, B=B, C=C)
