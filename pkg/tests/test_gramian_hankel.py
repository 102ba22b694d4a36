"""Tests for Gramians, Hankel matrices and the symmetric-matrix helpers."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gramslice.config import Tolerances
from gramslice.core.gramian_hankel import (
    factored_hankel_values,
    gramians,
    hankel_matrix,
    hankel_norm,
    hankel_spectrum,
    loewner_sandwich_epsilon,
    markov_parameters,
    numerical_rank,
    observability_matrix,
    reachability_matrix,
    spectral_log_epsilon,
    sym_inv_sqrt,
    sym_sqrt,
    whiten,
)
from gramslice.core.system_model import random_system
from gramslice.exceptions import (
    GramsliceError,
    HorizonError,
    MemoryBudgetError,
    MetricError,
    NearSingularGramianError,
    NotPositiveDefiniteError,
)
from gramslice.models import GramianSet, HankelSpectrum


def _random_spd(seed: int, n: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n))
    return G @ G.T + 0.1 * np.eye(n)


class TestBlockMatrices:
    """Tests for R(t), O(t) and H(t) layouts."""

    def test_reachability_column_layout(self, small_system):
        R = reachability_matrix(small_system, 5)
        assert R.shape == (4, 10)
        A3 = np.linalg.matrix_power(small_system.A, 3)
        assert_allclose(R[:, 3 * 2 + 1], A3 @ small_system.B[:, 1], rtol=1e-12)

    def test_observability_row_layout(self, small_system):
        O = observability_matrix(small_system, 5)  # noqa: E741
        assert O.shape == (10, 4)
        A2 = np.linalg.matrix_power(small_system.A, 2)
        assert_allclose(O[2 * 2 + 0], small_system.C[0] @ A2, rtol=1e-12)

    def test_gramians_match_sums(self, small_system):
        g = gramians(small_system, 6)
        A, B, C = small_system.A, small_system.B, small_system.C
        P = sum(np.linalg.matrix_power(A, k) @ B @ B.T @ np.linalg.matrix_power(A, k).T for k in range(6))
        Q = sum(np.linalg.matrix_power(A, k).T @ C.T @ C @ np.linalg.matrix_power(A, k) for k in range(6))
        assert_allclose(g.P, P, rtol=1e-10)
        assert_allclose(g.Q, Q, rtol=1e-10)
        assert g.t == 6

    def test_gramians_need_t_at_least_n(self, small_system):
        with pytest.raises(HorizonError):
            gramians(small_system, 3)

    def test_hankel_blocks(self, small_system):
        H = hankel_matrix(small_system, 4)
        assert H.shape == (8, 8)
        block = H[2:4, 4:6]
        expected = small_system.C @ np.linalg.matrix_power(small_system.A, 3) @ small_system.B
        assert_allclose(block, expected, rtol=1e-12)

    def test_anti_diagonal_blocks_identical(self, small_system):
        H = hankel_matrix(small_system, 4)
        assert np.array_equal(H[2:4, 4:6], H[4:6, 2:4])
        assert np.array_equal(H[0:2, 6:8], H[6:8, 0:2])

    def test_markov_parameters(self, small_system):
        markov = markov_parameters(small_system, 3)
        assert_allclose(markov[2], small_system.C @ small_system.A @ small_system.A @ small_system.B)

    def test_memory_budget(self, small_system):
        with pytest.raises(MemoryBudgetError, match="memory budget"):
            reachability_matrix(small_system, 10, Tolerances(memory_budget_entries=20))


class TestHankelSpectrum:
    """Hankel singular values from the Gramians agree with the explicit H(t)."""

    @pytest.mark.parametrize("seed", range(10))
    def test_sandwich_matches_explicit_svd(self, seed):
        n = 2 + seed % 7
        system = random_system(n, 2, 3, seed=100 + seed)
        t = 3 * n
        spectrum = hankel_spectrum(gramians(system, t))
        explicit = np.linalg.svd(hankel_matrix(system, t), compute_uv=False)[:n]
        assert_allclose(spectrum.values, explicit, rtol=1e-8, atol=1e-8 * explicit[0])

    @pytest.mark.parametrize("seed", range(5))
    def test_squares_are_eigenvalues_of_pq(self, seed):
        system = random_system(5, 2, 2, seed=200 + seed)
        g = gramians(system, 10)
        eigenvalues = np.sort(np.linalg.eigvals(g.P @ g.Q).real)[::-1]
        squares = np.array(hankel_spectrum(g).values) ** 2
        assert_allclose(squares, eigenvalues, rtol=1e-8, atol=1e-8 * eigenvalues[0])

    def test_factored_values_match_explicit_svd(self, small_system):
        t = 8
        values = factored_hankel_values(
            observability_matrix(small_system, t), reachability_matrix(small_system, t)
        )
        explicit = np.linalg.svd(hankel_matrix(small_system, t), compute_uv=False)[:4]
        assert_allclose(values, explicit, rtol=1e-10, atol=1e-12 * explicit[0])

    def test_norm_is_largest_value(self, small_system):
        spectrum = hankel_spectrum(gramians(small_system, 8))
        assert hankel_norm(spectrum) == spectrum.values[0]
        assert list(spectrum.values) == sorted(spectrum.values, reverse=True)

    def test_spectrum_must_be_sorted(self):
        with pytest.raises(ValueError, match="descending"):
            HankelSpectrum(values=(1.0, 2.0), t=3)

    def test_empty_spectrum_has_no_norm(self):
        with pytest.raises(MetricError, match="empty") as exc_info:
            hankel_norm(HankelSpectrum(values=(), t=1))
        assert isinstance(exc_info.value, GramsliceError)
        assert exc_info.value.metric == "hankel-norm"

    def test_gramian_set_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefiniteError):
            GramianSet(P=np.diag([1.0, -1.0]), Q=np.eye(2), t=2)


class TestSymmetricHelpers:
    """Tests for square roots, whitening and sandwich factors."""

    def test_sqrt_squares_back(self):
        S = _random_spd(1, 5)
        root = sym_sqrt(S)
        assert_allclose(root @ root, S, rtol=1e-10, atol=1e-12)
        assert_allclose(root, root.T)

    def test_inverse_sqrt(self):
        S = _random_spd(2, 4)
        inv_root = sym_inv_sqrt(S)
        assert_allclose(inv_root @ S @ inv_root, np.eye(4), atol=1e-10)

    def test_inverse_sqrt_refuses_singular(self):
        with pytest.raises(NearSingularGramianError, match="near-singular"):
            sym_inv_sqrt(np.diag([1.0, 0.0]))

    def test_sqrt_refuses_negative(self):
        with pytest.raises(NotPositiveDefiniteError):
            sym_sqrt(np.diag([1.0, -0.5]))

    def test_sqrt_clamps_rounding_noise(self):
        root = sym_sqrt(np.diag([1.0, -1e-14]))
        assert_allclose(root, np.diag([1.0, 0.0]), atol=1e-12)

    def test_whiten_is_isotropic(self):
        rng = np.random.default_rng(5)
        V = rng.standard_normal((3, 12)) * np.array([[1e2], [1.0], [1e-2]])
        U = whiten(V)
        assert_allclose(U @ U.T, np.eye(3), atol=1e-12)

    def test_whiten_equals_inverse_sqrt(self):
        rng = np.random.default_rng(6)
        V = rng.standard_normal((3, 9))
        expected = sym_inv_sqrt(V @ V.T) @ V
        assert_allclose(whiten(V), expected, atol=1e-10)

    def test_whiten_refuses_rank_deficient(self):
        V = np.zeros((2, 5))
        V[0] = 1.0
        with pytest.raises(NearSingularGramianError):
            whiten(V)

    def test_numerical_rank(self):
        assert numerical_rank(np.diag([1.0, 1e-3, 1e-15])) == 2
        assert numerical_rank(np.zeros((0, 3))) == 0

    def test_loewner_factor_of_scaled_matrix(self):
        S = _random_spd(3, 4)
        assert loewner_sandwich_epsilon(S, math.exp(0.3) * S) == pytest.approx(0.3, abs=1e-10)
        assert loewner_sandwich_epsilon(S, math.exp(-0.2) * S) == pytest.approx(0.2, abs=1e-10)

    def test_loewner_factor_of_singular_matrix(self):
        assert loewner_sandwich_epsilon(np.eye(2), np.diag([1.0, 0.0])) == math.inf

    def test_spectral_log_epsilon(self):
        reference = np.array([4.0, 2.0, 1.0])
        scheduled = np.array([4.0 * math.e, 2.0, 1.0 / math.e**2])
        assert spectral_log_epsilon(reference, scheduled) == pytest.approx(2.0)
        assert spectral_log_epsilon(reference, np.array([1.0, 1.0, 0.0])) == math.inf
