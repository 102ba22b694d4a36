"""
Deterministic dual-set spectral sparsification.

A single pass keeps a running matrix A between two moving barriers
mu_lower(tau) = tau - sqrt(kappa n) and mu_upper(tau) = delta_upper (tau + sqrt(kappa n)).
At each of kappa iterations it adds one weighted rank-one term u_j u_j^T chosen
so that both barrier potentials stay bounded. The weights, rescaled at the
end, give e^{-eps} I <= sum w_j u_j u_j^T <= e^{eps} I with
eps = 2 atanh(sqrt(n / kappa)).

Flow:
1. Check the candidate family sums to I and n < kappa <= candidate count
2. Per iteration: one eigendecomposition of A, gains of every candidate
   from the same eigenbasis, pick argmax(L - U) among U <= L
3. Step 2 / (U + L) on the chosen index, record the trace
4. Rescale the weights (proof or listing normalization)
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from gramslice.config import DEFAULT_TOLERANCES, Tolerances, WeightNormalization
from gramslice.core.gramian_hankel import symmetrize, whiten
from gramslice.exceptions import (
    BarrierViolationError,
    BudgetError,
    DimensionMismatchError,
    IsotropyError,
    SingularResolventError,
    SparsifierBreakdownError,
)
from gramslice.logging import get_logger, log_sparsifier_iteration

logger = get_logger(__name__)

IterationCallback = Callable[["IterationRecord"], None]
# Receives the record of every barrier step, then one final record at tau = kappa.


@dataclass
class BarrierState:
    """
    Mutable loop state of one sparsifier pass.

    Attributes:
        tau: Iterations completed so far
        lower: Lower barrier mu_lower(tau)
        upper: Upper barrier mu_upper(tau)
        delta_lower: Lower barrier shift per iteration (always 1)
        delta_upper: Upper barrier shift per iteration, (1 + x) / (1 - x)
        matrix: Accumulated sum of weighted rank-one terms
        weights: Unnormalized weight per candidate
    """

    tau: int
    lower: float
    upper: float
    delta_lower: float
    delta_upper: float
    matrix: np.ndarray
    weights: np.ndarray

    @classmethod
    def initial(cls, n: int, candidate_count: int, kappa: int) -> "BarrierState":
        x = math.sqrt(n / kappa)
        delta_upper = (1.0 + x) / (1.0 - x)
        root = math.sqrt(kappa * n)
        return cls(
            tau=0,
            lower=-root,
            upper=delta_upper * root,
            delta_lower=1.0,
            delta_upper=delta_upper,
            matrix=np.zeros((n, n)),
            weights=np.zeros(candidate_count),
        )

    def advance(self, kappa: int, n: int) -> None:
        self.tau += 1
        root = math.sqrt(kappa * n)
        self.lower = self.tau - root
        self.upper = self.delta_upper * (self.tau + root)

    @property
    def selected_count(self) -> int:
        return int(np.count_nonzero(self.weights))


@dataclass(frozen=True)
class IterationRecord:
    """One line of the iteration trace."""

    tau: int
    lower: float
    upper: float
    index: int | None
    step: float | None
    lambda_min: float
    lambda_max: float
    phi_lower: float
    phi_upper: float
    final: bool = False

    def to_dict(self) -> dict[str, object]:
        return {
            "tau": self.tau,
            "lower": self.lower,
            "upper": self.upper,
            "index": self.index,
            "step": self.step,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "phi_lower": self.phi_lower,
            "phi_upper": self.phi_upper,
            "final": self.final,
        }


@dataclass(frozen=True, eq=False)
class SparsifyResult:
    """
    Output of a single sparsifier pass.

    Attributes:
        weights: Nonnegative weight per candidate, mostly zero
        kappa: Iteration budget
        n: Dimension of the candidate vectors
        epsilon_theory: Guaranteed sandwich factor for this normalization
        normalization: Final rescaling that was applied
        trace: One record per iteration plus a final record
    """

    weights: np.ndarray
    kappa: int
    n: int
    epsilon_theory: float
    normalization: WeightNormalization = WeightNormalization.PROOF
    trace: tuple[IterationRecord, ...] = field(default_factory=tuple)

    @property
    def selected_count(self) -> int:
        return int(np.count_nonzero(self.weights))


@dataclass(frozen=True, eq=False)
class DualSetResult:
    """Weights from the two passes of gen_dual_set."""

    s: np.ndarray
    r: np.ndarray
    v_pass: SparsifyResult
    u_pass: SparsifyResult


def sandwich_epsilon_bound(
    n: int, kappa: int, normalization: WeightNormalization = WeightNormalization.PROOF
) -> float:
    """
    Guaranteed Loewner factor of a pass with budget kappa.

    PROOF normalization: 2 atanh(x); LISTING: -2 ln(1 - x), the larger side
    of the [(1 - x)^2, (1 + x)^2] bracket. x = sqrt(n / kappa).
    """
    if kappa <= n:
        raise BudgetError(kappa, n, kappa)
    x = math.sqrt(n / kappa)
    if normalization is WeightNormalization.LISTING:
        return -2.0 * math.log1p(-x)
    return 2.0 * math.atanh(x)


def phi_lower(mu: float, matrix: np.ndarray) -> float:
    """Lower potential sum_i 1 / (lambda_i - mu); requires mu < lambda_min."""
    eigenvalues = np.linalg.eigvalsh(symmetrize(matrix))
    if mu >= eigenvalues[0]:
        raise BarrierViolationError("lower", mu, float(eigenvalues[0]))
    return float(np.sum(1.0 / (eigenvalues - mu)))


def phi_upper(mu: float, matrix: np.ndarray) -> float:
    """Upper potential sum_i 1 / (mu - lambda_i); requires mu > lambda_max."""
    eigenvalues = np.linalg.eigvalsh(symmetrize(matrix))
    if mu <= eigenvalues[-1]:
        raise BarrierViolationError("upper", mu, float(eigenvalues[-1]))
    return float(np.sum(1.0 / (mu - eigenvalues)))


def _resolvent_moments(
    gaps: np.ndarray, projections: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    # gaps are the eigenvalues of the resolvent argument, projections the
    # candidates in the eigenbasis; returns v^T M^{-1} v and v^T M^{-2} v.
    if np.any(gaps == 0.0) or not np.all(np.isfinite(1.0 / gaps)):
        raise SingularResolventError("shifted barrier coincides with an eigenvalue")
    inverse = 1.0 / gaps
    squared = projections * projections
    return inverse @ squared, (inverse * inverse) @ squared


def _lower_gains(
    eigenvalues: np.ndarray, projections: np.ndarray, mu: float, delta: float
) -> np.ndarray:
    shifted = eigenvalues - (mu + delta)
    first, second = _resolvent_moments(shifted, projections)
    potential_gap = float(np.sum(1.0 / shifted) - np.sum(1.0 / (eigenvalues - mu)))
    if potential_gap == 0.0 or not math.isfinite(potential_gap):
        raise SingularResolventError("lower potential difference is zero")
    return second / potential_gap - first


def _upper_gains(
    eigenvalues: np.ndarray, projections: np.ndarray, mu: float, delta: float
) -> np.ndarray:
    shifted = (mu + delta) - eigenvalues
    first, second = _resolvent_moments(shifted, projections)
    potential_gap = float(np.sum(1.0 / (mu - eigenvalues)) - np.sum(1.0 / shifted))
    if potential_gap == 0.0 or not math.isfinite(potential_gap):
        raise SingularResolventError("upper potential difference is zero")
    return second / potential_gap + first


def gain_lower(v: np.ndarray, delta: float, matrix: np.ndarray, mu: float) -> float:
    """
    L(v) = v^T (A - (mu + delta) I)^{-2} v / (phi_L(mu + delta) - phi_L(mu))
           - v^T (A - (mu + delta) I)^{-1} v

    evaluated from one eigendecomposition of A.
    """
    eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(matrix))
    projections = eigenvectors.T @ np.asarray(v, dtype=float).reshape(-1, 1)
    return float(_lower_gains(eigenvalues, projections, mu, delta)[0])


def gain_upper(u: np.ndarray, delta: float, matrix: np.ndarray, mu: float) -> float:
    """
    U(u) = u^T ((mu + delta) I - A)^{-2} u / (phi_U(mu) - phi_U(mu + delta))
           + u^T ((mu + delta) I - A)^{-1} u
    """
    eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(matrix))
    projections = eigenvectors.T @ np.asarray(u, dtype=float).reshape(-1, 1)
    return float(_upper_gains(eigenvalues, projections, mu, delta)[0])


def isotropy_deviation(candidates: np.ndarray) -> float:
    """||sum u u^T - I||_F / ||I||_F."""
    n = candidates.shape[0]
    return float(np.linalg.norm(candidates @ candidates.T - np.eye(n)) / math.sqrt(n))


def _state_dump(state: BarrierState, eigenvalues: np.ndarray, kappa: int, **extra) -> dict:
    return {
        "tau": state.tau,
        "kappa": kappa,
        "lower": state.lower,
        "upper": state.upper,
        "delta_upper": state.delta_upper,
        "eigenvalues": eigenvalues,
        "selected": state.selected_count,
        **extra,
    }


def bss_pass(
    candidates: np.ndarray,
    kappa: int,
    normalization: WeightNormalization = WeightNormalization.PROOF,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    on_iteration: IterationCallback | None = None,
) -> SparsifyResult:
    """
    Sparsify an isotropic family (columns of ``candidates``) down to at most kappa terms.

    Args:
        candidates: n x N matrix whose columns u_i satisfy sum u_i u_i^T = I
        kappa: Number of barrier iterations, n < kappa <= N
        normalization: Final rescaling of the weights
        tolerances: Isotropy and selection tolerances
        on_iteration: Optional hook receiving each trace record as it is produced

    Returns:
        SparsifyResult with at most kappa positive weights

    Raises:
        IsotropyError: If the family does not sum to the identity
        BudgetError: If kappa is outside (n, N]
        SparsifierBreakdownError: If no admissible index exists or a barrier is crossed
    """
    candidates = np.asarray(candidates, dtype=float)
    if candidates.ndim != 2:
        raise DimensionMismatchError("candidates", "an n x N matrix", candidates.shape)
    n, count = candidates.shape
    if not n < kappa <= count:
        raise BudgetError(kappa, n, count)
    deviation = isotropy_deviation(candidates)
    if deviation > tolerances.isotropy_rtol:
        raise IsotropyError(deviation, tolerances.isotropy_rtol)

    epsilon_theory = sandwich_epsilon_bound(n, kappa, normalization)
    state = BarrierState.initial(n, count, kappa)
    norms = np.einsum("ij,ij->j", candidates, candidates)
    usable = norms > np.finfo(float).eps * float(norms.max())
    trace: list[IterationRecord] = []

    def record(eigenvalues: np.ndarray, index: int | None, step: float | None) -> None:
        lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
        if not (state.lower < lam_min and lam_max < state.upper):
            raise SparsifierBreakdownError(
                state.tau,
                "barrier invariant violated",
                _state_dump(state, eigenvalues, kappa),
            )
        entry = IterationRecord(
            tau=state.tau,
            lower=state.lower,
            upper=state.upper,
            index=index,
            step=step,
            lambda_min=lam_min,
            lambda_max=lam_max,
            phi_lower=float(np.sum(1.0 / (eigenvalues - state.lower))),
            phi_upper=float(np.sum(1.0 / (state.upper - eigenvalues))),
            final=index is None,
        )
        trace.append(entry)
        if on_iteration is not None:
            on_iteration(entry)

    eigenvalues, eigenvectors = np.linalg.eigh(state.matrix)
    for _ in range(kappa):
        projections = eigenvectors.T @ candidates
        lower_gains = _lower_gains(eigenvalues, projections, state.lower, state.delta_lower)
        upper_gains = _upper_gains(eigenvalues, projections, state.upper, state.delta_upper)

        gaps = lower_gains - upper_gains
        slack = tolerances.selection_rtol * np.maximum(np.abs(lower_gains), np.abs(upper_gains))
        admissible = usable & (lower_gains + upper_gains > 0.0) & (gaps >= -slack)
        if not np.any(admissible):
            raise SparsifierBreakdownError(
                state.tau,
                "no index with U <= L",
                _state_dump(
                    state,
                    eigenvalues,
                    kappa,
                    best_gap=float(np.max(gaps)),
                    sum_lower=float(np.sum(lower_gains)),
                    sum_upper=float(np.sum(upper_gains)),
                ),
            )
        j = int(np.argmax(np.where(admissible, gaps, -np.inf)))
        step = 2.0 / float(upper_gains[j] + lower_gains[j])
        record(eigenvalues, j, step)

        state.weights[j] += step
        column = candidates[:, j]
        state.matrix = symmetrize(state.matrix + step * np.outer(column, column))
        log_sparsifier_iteration(
            logger,
            state.tau,
            state.lower,
            state.upper,
            j,
            step,
            float(eigenvalues[0]),
            float(eigenvalues[-1]),
        )
        state.advance(kappa, n)
        eigenvalues, eigenvectors = np.linalg.eigh(state.matrix)

    record(eigenvalues, None, None)

    x = math.sqrt(n / kappa)
    if normalization is WeightNormalization.LISTING:
        scale = (1.0 - x) / kappa
    else:
        scale = 1.0 / (kappa * (1.0 + x))

    return SparsifyResult(
        weights=state.weights * scale,
        kappa=kappa,
        n=n,
        epsilon_theory=epsilon_theory,
        normalization=normalization,
        trace=tuple(trace),
    )


def gen_dual_set(
    V: np.ndarray,
    U: np.ndarray,
    kappa_v: int,
    kappa_u: int,
    normalization: WeightNormalization = WeightNormalization.PROOF,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    on_iteration: Callable[[str, IterationRecord], None] | None = None,
) -> DualSetResult:
    """
    Weights s for V (sum v v^T = X, X positive definite) and r for isotropic U.

    V is whitened to X^{-1/2} V before its pass, so
    e^{-eps_v} X <= sum s_i v_i v_i^T <= e^{eps_v} X and
    e^{-eps_u} I <= sum r_i u_i u_i^T <= e^{eps_u} I,
    with at most kappa_v and kappa_u nonzero weights.
    """
    V = np.asarray(V, dtype=float)
    U = np.asarray(U, dtype=float)
    if V.shape[0] != U.shape[0]:
        raise DimensionMismatchError("dual-set families", V.shape[0], U.shape[0])

    def hook(label: str) -> IterationCallback | None:
        if on_iteration is None:
            return None
        return lambda entry: on_iteration(label, entry)

    whitened = whiten(V, tolerances, what="X = V V^T")
    v_pass = bss_pass(whitened, kappa_v, normalization, tolerances, hook("V"))
    u_pass = bss_pass(U, kappa_u, normalization, tolerances, hook("U"))
    return DualSetResult(s=v_pass.weights, r=u_pass.weights, v_pass=v_pass, u_pass=u_pass)
