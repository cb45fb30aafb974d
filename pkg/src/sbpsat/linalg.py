"""Dense linear-algebra kernels shared by the rest of the package.

Matrices are plain two-dimensional ``numpy.ndarray`` objects with float64
(or complex128) entries in row-major order. All routines are pure functions
of their inputs and never mutate the arrays they receive, so results can be
shared freely across threads.

The eigensolvers delegate to LAPACK through numpy, which satisfies the
accuracy contracts here (symmetric reconstruction to 1e-10 relative,
eigenpair residuals to 1e-9 relative) with large margin at the matrix
sizes this package works with.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergenceError, NotSymmetricError, SingularMatrixError

__all__ = [
    "EigenResult",
    "lu_solve",
    "lu_solve_refined",
    "sym_eigen",
    "general_eigenvalues",
    "kron",
    "rank_with_tolerance",
]

_GENERAL_EIG_MAX_DIM = 4096


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues, optionally paired with eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _norm_inf(a: np.ndarray) -> float:
    """Induced infinity norm (maximum absolute row sum) of a matrix."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(a), axis=1)))


def _require_square(a: np.ndarray, name: str = "A") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def lu_solve(a: np.ndarray, b: np.ndarray, pivot_tol_rel: float = 1e-14) -> np.ndarray:
    """Solve ``a @ x = b`` by LU factorization with partial pivoting.

    ``b`` may be a vector or a matrix of stacked right-hand-side columns;
    the result has the same shape. Raises SingularMatrixError when the
    smallest pivot magnitude does not exceed ``pivot_tol_rel`` times the
    infinity norm of ``a``.
    """
    a = _require_square(a)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise ValueError(
            f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a)
    pivots = np.abs(np.diag(lu))
    if pivots.size and np.min(pivots) <= pivot_tol_rel * _norm_inf(a):
        raise SingularMatrixError(
            f"pivot {np.min(pivots):.3e} below threshold "
            f"{pivot_tol_rel:.1e} * ||A||_inf = {pivot_tol_rel * _norm_inf(a):.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), b)


def lu_solve_refined(
    a: np.ndarray,
    b: np.ndarray,
    refine_steps: int = 2,
    pivot_tol_rel: float = 1e-14,
) -> np.ndarray:
    """LU solve followed by iterative refinement.

    The residual of each refinement step is evaluated in extended precision,
    which recovers solutions accurate to a few float64 ulps even when the
    factorization alone loses digits to conditioning. Used where downstream
    identities must hold well below 1e-12 relative.
    """
    a = _require_square(a)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != a.shape[0]:
        raise ValueError(
            f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a)
    pivots = np.abs(np.diag(lu))
    if pivots.size and np.min(pivots) <= pivot_tol_rel * _norm_inf(a):
        raise SingularMatrixError(
            f"pivot {np.min(pivots):.3e} below threshold "
            f"{pivot_tol_rel:.1e} * ||A||_inf"
        )
    x = scipy.linalg.lu_solve((lu, piv), b)
    a_hi = a.astype(np.longdouble)
    b_hi = b.astype(np.longdouble)
    for _ in range(refine_steps):
        res = np.asarray(b_hi - a_hi @ x.astype(np.longdouble), dtype=float)
        x = x + scipy.linalg.lu_solve((lu, piv), res)
    return x


def sym_eigen(a: np.ndarray, sym_tol_rel: float = 1e-12) -> EigenResult:
    """Eigendecomposition of a symmetric matrix.

    Returns real eigenvalues sorted in descending order and the matching
    orthonormal eigenvectors as columns. Raises NotSymmetricError when
    ``||A - A^T||_inf`` exceeds ``sym_tol_rel * ||A||_inf``.
    """
    a = _require_square(a)
    asym = _norm_inf(a - a.T)
    if asym > sym_tol_rel * _norm_inf(a):
        raise NotSymmetricError(
            f"||A - A^T||_inf = {asym:.3e} exceeds "
            f"{sym_tol_rel:.1e} * ||A||_inf = {sym_tol_rel * _norm_inf(a):.3e}"
        )
    vals, vecs = np.linalg.eigh(a)
    return EigenResult(eigenvalues=vals[::-1].copy(), eigenvectors=vecs[:, ::-1].copy())


def general_eigenvalues(a: np.ndarray) -> EigenResult:
    """Full complex spectrum of a general square matrix.

    Eigenvalues are sorted by descending real part, ties broken by
    descending imaginary part, and the eigenvector columns are permuted
    to match. Matrices larger than 4096 rows are rejected since the dense
    algorithm is not meant for that scale.
    """
    a = _require_square(a)
    if a.shape[0] > _GENERAL_EIG_MAX_DIM:
        raise ValueError(
            f"matrix dimension {a.shape[0]} exceeds the dense limit "
            f"{_GENERAL_EIG_MAX_DIM}"
        )
    try:
        vals, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    order = np.lexsort((-vals.imag, -vals.real))
    return EigenResult(eigenvalues=vals[order], eigenvectors=vecs[:, order])


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def rank_with_tolerance(a: np.ndarray, tol_rel: float) -> int:
    """Numerical rank via column-pivoted QR.

    Diagonal entries of R whose magnitude is at most ``tol_rel`` times the
    largest one count as zero. An all-zero (or empty) matrix has rank 0.
    """
    if tol_rel <= 0:
        raise ValueError(f"tol_rel must be positive, got {tol_rel}")
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0
    r = scipy.linalg.qr(a, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        return 0
    return int(np.count_nonzero(diag > tol_rel * diag[0]))
