"""Tests for tolerance-aware linear algebra."""

import numpy as np
import pytest

from src.descriptor_refine.core import numkit
from src.descriptor_refine.core.numkit import Tolerance
from src.descriptor_refine.utils.exceptions import DimensionMismatchError, RankDeficientError


def test_tolerance_rejects_out_of_range_values():
    with pytest.raises(ValueError, match="rank_rtol"):
        Tolerance(rank_rtol=1.5)
    with pytest.raises(ValueError, match="residual_atol"):
        Tolerance(residual_atol=0.0)


def test_tolerance_from_settings_honours_overrides(monkeypatch):
    monkeypatch.setattr("config.settings.settings.RANK_RTOL", 1e-8)
    tol = Tolerance.from_settings(residual_atol=1e-6)
    assert tol.rank_rtol == 1e-8
    assert tol.residual_atol == 1e-6


def test_as_matrix_is_read_only_and_finite():
    m = numkit.as_matrix([[1, 2], [3, 4]], "m")
    assert m.dtype == float
    with pytest.raises(ValueError, match="read-only"):
        m[0, 0] = 5.0
    with pytest.raises(ValueError, match="NaN"):
        numkit.as_matrix([[np.nan]], "m")
    with pytest.raises(DimensionMismatchError, match="shape"):
        numkit.as_matrix([[1.0, 2.0]], "m", (2, 1))


def test_rank_of_examples(concrete):
    assert numkit.rank_of(np.eye(3)) == 3
    assert numkit.rank_of(np.hstack([concrete.E, concrete.B])) == 3
    assert numkit.rank_of(np.zeros((2, 4))) == 0
    assert numkit.rank_of(np.zeros((0, 3))) == 0


def test_kernel_onb_of_step_matrix(concrete):
    kernel = numkit.kernel_onb(concrete.step_matrix)
    assert kernel.shape == (4, 1)
    np.testing.assert_allclose(kernel[:, 0], [0.0, 1.0, 0.0, 0.0], atol=1e-12)


def test_kernel_onb_trivial_and_one_dimensional():
    assert numkit.kernel_onb(np.eye(2)).shape == (2, 0)
    kernel = numkit.kernel_onb(np.array([[1.0, 1.0]]))
    np.testing.assert_allclose(kernel[:, 0], np.array([1.0, -1.0]) / np.sqrt(2.0), atol=1e-12)


def test_kernel_onb_first_nonzero_entry_is_positive(rng):
    for _ in range(20):
        kernel = numkit.kernel_onb(rng.standard_normal((2, 5)))
        for column in kernel.T:
            first = column[np.flatnonzero(np.abs(column) > 1e-9)[0]]
            assert first > 0


def test_right_inverse_examples(concrete):
    np.testing.assert_allclose(numkit.right_inverse(np.eye(3)), np.eye(3))
    m = concrete.step_matrix
    np.testing.assert_allclose(m @ numkit.right_inverse(m), np.eye(3), atol=1e-12)
    with pytest.raises(RankDeficientError):
        numkit.right_inverse(np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))


def test_min_norm_solve_examples():
    solution, feasible = numkit.min_norm_solve(np.array([[0.0], [-1.0]]), np.array([0.0, 5.0]))
    assert feasible
    np.testing.assert_allclose(solution, [-5.0])

    b = np.array([1.0, 2.0, 3.0])
    solution, feasible = numkit.min_norm_solve(np.eye(3), b)
    assert feasible
    np.testing.assert_allclose(solution, b)

    _, feasible = numkit.min_norm_solve(np.zeros((2, 1)), np.array([1.0, 0.0]))
    assert not feasible


def test_min_norm_solve_handles_empty_unknowns():
    solution, feasible = numkit.min_norm_solve(np.zeros((2, 0)), np.zeros(2))
    assert solution.shape == (0,)
    assert feasible
    _, feasible = numkit.min_norm_solve(np.zeros((2, 0)), np.ones(2))
    assert not feasible


def test_image_contained_examples():
    outer = np.array([[1.0], [2.0]])
    assert numkit.image_contained(np.zeros((2, 1)), outer)
    assert numkit.image_contained(outer, outer)
    assert not numkit.image_contained(np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]]))
    with pytest.raises(DimensionMismatchError):
        numkit.image_contained(np.zeros((3, 1)), outer)


def test_image_contained_ignores_round_off():
    assert numkit.image_contained(np.array([[1e-13], [0.0]]), np.array([[0.0], [1.0]]))


def test_random_matrices_kernel_and_right_inverse_residuals(rng):
    tol = numkit.DEFAULT_TOLERANCE
    for _ in range(500):
        rows, cols = rng.integers(1, 9, size=2)
        rank = int(rng.integers(0, min(rows, cols) + 1))
        m = rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))
        kernel = numkit.kernel_onb(m)
        assert kernel.shape == (cols, cols - numkit.rank_of(m))
        assert numkit.inf_norm(m @ kernel) <= 1e-9 * max(1.0, numkit.inf_norm(m))
        assert numkit.is_orthonormal(kernel)
        if numkit.rank_of(m) == rows:
            m_plus = numkit.right_inverse(m, tol)
            assert numkit.inf_norm(m @ m_plus - np.eye(rows)) <= tol.residual_atol
        else:
            with pytest.raises(RankDeficientError):
                numkit.right_inverse(m, tol)


def test_random_matrices_rank_is_transpose_invariant(rng):
    for _ in range(500):
        rows, cols = rng.integers(1, 9, size=2)
        rank = int(rng.integers(0, min(rows, cols) + 1))
        m = rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols))
        assert numkit.rank_of(m) == numkit.rank_of(m.T) == rank


def test_random_images_are_reflexive_and_transitive(rng):
    for _ in range(200):
        rows = int(rng.integers(2, 9))
        outer = rng.standard_normal((rows, int(rng.integers(1, rows))))
        middle = outer @ rng.standard_normal((outer.shape[1], int(rng.integers(1, 6))))
        inner = middle @ rng.standard_normal((middle.shape[1], int(rng.integers(1, 6))))
        for m in (outer, middle, inner):
            assert numkit.image_contained(m, m)
        assert numkit.image_contained(inner, middle)
        assert numkit.image_contained(middle, outer)
        assert numkit.image_contained(inner, outer)
        # outer has fewer columns than rows, so a generic vector escapes it
        assert not numkit.image_contained(rng.standard_normal((rows, 1)), outer)
