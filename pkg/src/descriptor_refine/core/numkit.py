"""Tolerance-aware dense linear algebra.

Every rank decision in the toolkit goes through :func:`rank_of`, so a single
:class:`Tolerance` value controls how the whole pipeline separates numerical
noise from structure.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from config.settings import settings
from src.descriptor_refine.utils.exceptions import DimensionMismatchError, RankDeficientError

logger = logging.getLogger(__name__)

_MATRIX_NDIM = 2


@dataclass(frozen=True)
class Tolerance:
    """Relative rank cutoff and absolute residual bound."""

    rank_rtol: float = 1e-10
    residual_atol: float = 1e-9

    def __post_init__(self):
        """Reject cutoffs outside their meaningful range."""
        if not 0.0 <= self.rank_rtol < 1.0:
            msg = f"rank_rtol must lie in [0, 1), got {self.rank_rtol}"
            raise ValueError(msg)
        if not self.residual_atol > 0.0:
            msg = f"residual_atol must be positive, got {self.residual_atol}"
            raise ValueError(msg)

    @classmethod
    def from_settings(cls, rank_rtol: float | None = None, residual_atol: float | None = None) -> "Tolerance":
        """Build a tolerance from configuration, with optional overrides."""
        return cls(
            rank_rtol=settings.RANK_RTOL if rank_rtol is None else rank_rtol,
            residual_atol=settings.RESIDUAL_ATOL if residual_atol is None else residual_atol,
        )


DEFAULT_TOLERANCE = Tolerance()


def as_matrix(values: object, name: str = "matrix", shape: tuple[int, int] | None = None) -> np.ndarray:
    """Return a read-only finite float64 2-D array built from ``values``."""
    m = np.array(values, dtype=float)
    if m.ndim == 1 and shape is not None and m.size == 0:
        m = m.reshape(shape)
    if m.ndim != _MATRIX_NDIM:
        msg = f"{name} must be two-dimensional, got shape {m.shape}"
        raise DimensionMismatchError(msg)
    if shape is not None and m.shape != tuple(shape):
        msg = f"{name} must have shape {tuple(shape)}, got {m.shape}"
        raise DimensionMismatchError(msg)
    if not np.all(np.isfinite(m)):
        msg = f"{name} contains NaN or infinite entries"
        raise ValueError(msg)
    m.setflags(write=False)
    return m


def as_vector(values: object, name: str = "vector", size: int | None = None) -> np.ndarray:
    """Return a finite float64 1-D array, optionally of a given length."""
    v = np.array(values, dtype=float).reshape(-1)
    if size is not None and v.size != size:
        msg = f"{name} must have length {size}, got {v.size}"
        raise DimensionMismatchError(msg)
    if not np.all(np.isfinite(v)):
        msg = f"{name} contains NaN or infinite entries"
        raise ValueError(msg)
    return v


def inf_norm(m: np.ndarray) -> float:
    """Largest absolute entry; 0 for empty arrays."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m)))


def singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values in descending order (empty for empty input)."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return np.zeros(0)
    return scipy.linalg.svdvals(m)


def rank_of(m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Count singular values above ``rank_rtol`` times the largest one."""
    s = singular_values(m)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_rtol * s[0]))


def _normalize_signs(basis: np.ndarray, tol: Tolerance) -> np.ndarray:
    # first entry that is clearly nonzero gets a positive sign
    for j in range(basis.shape[1]):
        column = basis[:, j]
        significant = np.flatnonzero(np.abs(column) > tol.residual_atol)
        if significant.size and column[significant[0]] < 0:
            basis[:, j] = -column
    return basis


def kernel_onb(m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of ker m, one column per kernel dimension.

    Columns are the right singular vectors of the vanishing singular values,
    each flipped so that its first nonzero entry is positive.
    """
    m = np.asarray(m, dtype=float)
    rows, cols = m.shape
    if cols == 0:
        return np.zeros((0, 0))
    if rows == 0:
        return np.eye(cols)
    _, _, vh = scipy.linalg.svd(m, full_matrices=True)
    r = rank_of(m, tol)
    basis = vh[r:].T.copy()
    logger.debug("kernel of %dx%d matrix: rank %d, nullity %d", rows, cols, r, cols - r)
    return _normalize_signs(basis, tol)


def pseudo_inverse(m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Moore-Penrose pseudoinverse that also accepts empty matrices."""
    m = np.asarray(m, dtype=float)
    rows, cols = m.shape
    if m.size == 0:
        return np.zeros((cols, rows))
    return scipy.linalg.pinv(m, atol=0.0, rtol=tol.rank_rtol)


def right_inverse(m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Moore-Penrose right inverse of a full-row-rank matrix."""
    m = np.asarray(m, dtype=float)
    rows = m.shape[0]
    r = rank_of(m, tol)
    if r < rows:
        msg = f"matrix of shape {m.shape} has rank {r} < {rows} rows; no right inverse"
        raise RankDeficientError(msg)
    m_plus = pseudo_inverse(m, tol)
    residual = inf_norm(m @ m_plus - np.eye(rows))
    if residual > tol.residual_atol:
        msg = f"right inverse residual {residual:.3e} exceeds {tol.residual_atol:.1e}"
        raise RankDeficientError(msg)
    return m_plus


def min_norm_solve(
    a: np.ndarray,
    b: np.ndarray,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[np.ndarray, bool]:
    """Minimum-norm least-squares solution of ``a @ x = b`` and its feasibility."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[0] != b.shape[0]:
        msg = f"row counts differ: a has {a.shape[0]}, b has {b.shape[0]}"
        raise DimensionMismatchError(msg)
    out_shape = (a.shape[1], *b.shape[1:])
    if a.size == 0 or b.size == 0:
        solution = np.zeros(out_shape)
    else:
        solution, *_ = scipy.linalg.lstsq(a, b, cond=tol.rank_rtol)
    residual = inf_norm(a @ solution - b)
    return solution, residual <= tol.residual_atol


def image_contained(inner: np.ndarray, outer: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether im(inner) is a subspace of im(outer)."""
    inner = np.asarray(inner, dtype=float)
    outer = np.asarray(outer, dtype=float)
    if inner.shape[0] != outer.shape[0]:
        msg = f"row counts differ: inner has {inner.shape[0]}, outer has {outer.shape[0]}"
        raise DimensionMismatchError(msg)
    if inf_norm(inner) <= tol.residual_atol:
        return True
    return rank_of(np.hstack([outer, inner]), tol) == rank_of(outer, tol)


def is_orthonormal(n: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether the columns of ``n`` are orthonormal."""
    n = np.asarray(n, dtype=float)
    return inf_norm(n.T @ n - np.eye(n.shape[1])) <= tol.residual_atol
