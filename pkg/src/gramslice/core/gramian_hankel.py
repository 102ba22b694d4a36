"""Reachability/observability matrices, Gramians, Hankel spectra and symmetric-matrix helpers.

Every eigenproblem here is symmetric: the Hankel spectrum is taken from
Q^{1/2} P Q^{1/2} rather than from the non-symmetric product PQ.
"""

import math

import numpy as np

from gramslice.config import DEFAULT_TOLERANCES, Tolerances
from gramslice.exceptions import (
    DimensionMismatchError,
    HorizonError,
    MemoryBudgetError,
    MetricError,
    NearSingularGramianError,
    NotPositiveDefiniteError,
)
from gramslice.models import GramianSet, HankelSpectrum, LtiSystem


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def numerical_rank(matrix: np.ndarray, rtol: float = DEFAULT_TOLERANCES.rank_rtol) -> int:
    """Rank with threshold max(dim) * sigma_max * rtol."""
    if matrix.size == 0:
        return 0
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    threshold = max(matrix.shape) * singular_values[0] * rtol
    return int(np.count_nonzero(singular_values > threshold))


def _check_budget(what: str, rows: int, cols: int, tolerances: Tolerances) -> None:
    if rows * cols > tolerances.memory_budget_entries:
        raise MemoryBudgetError(what, rows, cols, tolerances.memory_budget_entries)


def _check_horizon(t: int, n: int, minimum: int) -> None:
    if t < minimum:
        reason = "horizon must be at least 1" if minimum == 1 else "horizon assumption t >= n"
        raise HorizonError(t, n, reason)


def state_blocks(A: np.ndarray, X: np.ndarray, count: int) -> list[np.ndarray]:
    """[X, A X, A^2 X, ...] by repeated multiplication."""
    blocks = [X]
    for _ in range(count - 1):
        blocks.append(A @ blocks[-1])
    return blocks


def reachability_matrix(
    system: LtiSystem, t: int, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """R(t) = [B, AB, ..., A^{t-1}B], shape n x (m t); column i*m + j is A^i b_j."""
    _check_horizon(t, system.n, 1)
    _check_budget("Reachability matrix", system.n, system.m * t, tolerances)
    return np.hstack(state_blocks(system.A, system.B, t))


def observability_matrix(
    system: LtiSystem, t: int, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """O(t) = [C; CA; ...; CA^{t-1}], shape (p t) x n; row i*p + j is c_j A^i."""
    _check_horizon(t, system.n, 1)
    _check_budget("Observability matrix", system.p * t, system.n, tolerances)
    return np.hstack(state_blocks(system.A.T, system.C.T, t)).T


def gramians(system: LtiSystem, t: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> GramianSet:
    """P(t) = R R^T and Q(t) = O^T O, symmetrized."""
    _check_horizon(t, system.n, system.n)
    R = reachability_matrix(system, t, tolerances)
    O = observability_matrix(system, t, tolerances)  # noqa: E741
    return GramianSet(P=symmetrize(R @ R.T), Q=symmetrize(O.T @ O), t=t)


def markov_parameters(system: LtiSystem, count: int) -> list[np.ndarray]:
    """[CB, CAB, ..., C A^{count-1} B]."""
    return [system.C @ block for block in state_blocks(system.A, system.B, count)]


def hankel_matrix(
    system: LtiSystem, t: int, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """
    H(t) = O(t) R(t), with block (i, j) = C A^{i+j} B.

    Blocks on one anti-diagonal are copies of the same Markov parameter, so
    they agree bit for bit.
    """
    _check_horizon(t, system.n, 1)
    _check_budget("Hankel matrix", system.p * t, system.m * t, tolerances)
    markov = markov_parameters(system, 2 * t - 1)
    return np.block([[markov[i + j] for j in range(t)] for i in range(t)])


def _eigh_psd(S: np.ndarray, what: str, tolerances: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(S))
    lam_max = max(float(eigenvalues[-1]), 0.0)
    if eigenvalues[0] < -tolerances.psd_rtol * lam_max:
        raise NotPositiveDefiniteError(what, float(eigenvalues[0]), float(eigenvalues[-1]))
    return np.clip(eigenvalues, 0.0, None), eigenvectors


def sym_sqrt(S: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """S^{1/2} = V diag(sqrt(lambda)) V^T for symmetric PSD S."""
    eigenvalues, V = _eigh_psd(S, "Matrix passed to sym_sqrt", tolerances)
    return symmetrize((V * np.sqrt(eigenvalues)) @ V.T)


def sym_inv_sqrt(S: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """S^{-1/2}; refuses matrices with lambda_min / lambda_max below the configured ratio."""
    eigenvalues, V = _eigh_psd(S, "Matrix passed to sym_inv_sqrt", tolerances)
    ratio = eigenvalues[0] / eigenvalues[-1] if eigenvalues[-1] > 0 else 0.0
    if ratio < tolerances.inverse_sqrt_min_ratio:
        raise NearSingularGramianError(
            "inverse square root", float(ratio), tolerances.inverse_sqrt_min_ratio
        )
    return symmetrize((V / np.sqrt(eigenvalues)) @ V.T)


def whiten(
    V: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES, what: str = "candidates"
) -> np.ndarray:
    """
    X^{-1/2} V for X = V V^T, computed from the thin SVD V = W S Z^T as W Z^T.

    The result sums (as rank-one columns) to the identity up to rounding,
    even when X itself is badly conditioned.
    """
    n, count = V.shape
    if count < n:
        raise NearSingularGramianError(what, 0.0, tolerances.inverse_sqrt_min_ratio)
    W, singular_values, Zt = np.linalg.svd(V, full_matrices=False)
    ratio = (singular_values[-1] / singular_values[0]) ** 2 if singular_values[0] > 0 else 0.0
    if ratio < tolerances.inverse_sqrt_min_ratio:
        raise NearSingularGramianError(what, float(ratio), tolerances.inverse_sqrt_min_ratio)
    return W @ Zt


def hankel_spectrum(g: GramianSet, tolerances: Tolerances = DEFAULT_TOLERANCES) -> HankelSpectrum:
    """sigma_i = sqrt(lambda_i(Q^{1/2} P Q^{1/2})), descending."""
    Q_half = sym_sqrt(g.Q, tolerances)
    eigenvalues, _ = _eigh_psd(Q_half @ g.P @ Q_half, "Hankel sandwich Q^1/2 P Q^1/2", tolerances)
    return HankelSpectrum(values=tuple(np.sqrt(eigenvalues)[::-1]), t=g.t)


def hankel_norm(spectrum: HankelSpectrum) -> float:
    if not spectrum.values:
        raise MetricError("hankel-norm", "Hankel spectrum is empty")
    return spectrum.values[0]


def loewner_sandwich_epsilon(
    X_ref: np.ndarray, X_s: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """
    Smallest eps with e^{-eps} X_ref <= X_s <= e^{eps} X_ref in the Loewner order.

    Returns math.inf when X_s is singular along a direction where X_ref is not.
    """
    if X_ref.shape != X_s.shape or X_ref.shape[0] != X_ref.shape[1]:
        raise DimensionMismatchError("sandwich operands", X_ref.shape, X_s.shape)
    ref_inv_half = sym_inv_sqrt(X_ref, tolerances)
    eigenvalues = np.linalg.eigvalsh(symmetrize(ref_inv_half @ X_s @ ref_inv_half))
    lam_min, lam_max = float(eigenvalues[0]), float(eigenvalues[-1])
    if lam_min <= 0.0:
        return math.inf
    return max(math.log(lam_max), -math.log(lam_min))


def spectral_log_epsilon(reference: np.ndarray, scheduled: np.ndarray) -> float:
    """max_i |ln(scheduled_i / reference_i)| over two eigenvalue lists sorted alike."""
    reference = np.asarray(reference, dtype=float)
    scheduled = np.asarray(scheduled, dtype=float)
    if reference.shape != scheduled.shape:
        raise DimensionMismatchError("spectra", reference.shape, scheduled.shape)
    if np.any(scheduled <= 0.0) or np.any(reference <= 0.0):
        return math.inf
    return float(np.max(np.abs(np.log(scheduled / reference))))


def factored_hankel_values(O: np.ndarray, R: np.ndarray) -> np.ndarray:
    """
    Singular values of the product O R, descending, without forming it.

    Both factors are reduced to their n x n triangular cores by thin QR, so
    the SVD runs on an n x n matrix whatever the horizon.
    """
    if O.shape[1] != R.shape[0]:
        raise DimensionMismatchError("Hankel factors", O.shape[1], R.shape[0])
    _, T_o = np.linalg.qr(O)
    _, T_r = np.linalg.qr(R.T)
    return np.linalg.svd(T_o @ T_r.T, compute_uv=False)
