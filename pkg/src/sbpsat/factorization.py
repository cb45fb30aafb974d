"""Signed factorizations A = Z Delta Z^T and boundary rotation data.

A symmetric boundary matrix A is factored as ``A = Z Delta Z^T`` with the
columns of Z ordered so that Delta = diag(Delta_plus, 0, Delta_minus). The
number of positive eigenvalues m_plus equals the number of boundary
conditions at the left boundary and m_minus the number at the right.

Boundary condition operators B_L (m_plus rows) and B_R (m_minus rows) are
reduced to rotation data by evaluating ``B Z^{-T}``: the block acting on
the incoming characteristics must be invertible (P), the block acting on
the zero-speed characteristics must vanish, and the remaining block,
premultiplied by P^{-1}, is the reflection coefficient R. The dual problem
reflects characteristics with ``R_tilde = -Delta_minus^{-1} R_L^T
Delta_plus`` on the left and the mirrored expression on the right.

The scalar advection-diffusion boundary matrix [[a, -eps], [-eps, 0]]
admits the explicit one-parameter family of factorizations

    Z = [[(a+w)/(2 s1), (a-w)/(2 s2)],
         [   -eps/s1,      -eps/s2  ]],   Delta = diag(s1^2/w, -s2^2/w),

valid for any w > 0 and nonzero scalings s1, s2. Choosing
w = sqrt(a^2 + 4 eps^2) with s1^2 = w(w + a)/2 and s2^2 = w(w - a)/2 makes
Z orthogonal, which is the plain eigendecomposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidOmegaError,
    InvalidZeroBlockError,
    ShapeMismatchError,
    SingularMatrixError,
    SingularPError,
)
from .linalg import lu_solve, sym_eigen

__all__ = [
    "SignedFactorization",
    "BoundaryRotation",
    "WellPosednessReport",
    "factor_symmetric",
    "omega_eigen",
    "scalar_family",
    "scalar_eigen_family",
    "extract_rotation",
    "dual_boundary_operators",
    "check_wellposedness",
]

_ZERO_COLUMN_TOL = 1e-10
_SINGULAR_P_TOL = 1e-10
_WELLPOSED_TOL = 1e-10


@dataclass(frozen=True)
class SignedFactorization:
    """A = Z diag(Delta_plus, 0, Delta_minus) Z^T with sign-sorted columns."""

    Z: np.ndarray
    Z_plus: np.ndarray
    Z_zero: np.ndarray
    Z_minus: np.ndarray
    Delta_plus: np.ndarray
    Delta_minus: np.ndarray
    inertia: tuple[int, int, int]

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    def reconstruct(self) -> np.ndarray:
        """Z Delta Z^T with the zero block exactly zero."""
        delta = np.concatenate(
            (self.Delta_plus, np.zeros(self.inertia[1]), self.Delta_minus)
        )
        return (self.Z * delta) @ self.Z.T


@dataclass(frozen=True)
class BoundaryRotation:
    """Rotation data (P, R) of both boundaries plus the dual reflections."""

    P_L: np.ndarray
    R_L: np.ndarray
    P_R: np.ndarray
    R_R: np.ndarray
    R_L_tilde: np.ndarray
    R_R_tilde: np.ndarray


@dataclass(frozen=True)
class WellPosednessReport:
    """Boundary dissipation matrices of the primal and dual problems."""

    C_L: np.ndarray
    C_R: np.ndarray
    C_L_tilde: np.ndarray
    C_R_tilde: np.ndarray
    max_eig_left: float | None
    max_eig_right: float | None
    max_eig_left_dual: float | None
    max_eig_right_dual: float | None
    well_posed: bool

    def to_dict(self) -> dict:
        return {
            "max_eig_left": self.max_eig_left,
            "max_eig_right": self.max_eig_right,
            "max_eig_left_dual": self.max_eig_left_dual,
            "max_eig_right_dual": self.max_eig_right_dual,
            "well_posed": self.well_posed,
        }


def factor_symmetric(
    a: np.ndarray, zero_tol_rel: float = 1e-12
) -> SignedFactorization:
    """Sign-sorted eigenfactorization of a symmetric matrix.

    Eigenvalues with magnitude at most ``zero_tol_rel`` times the largest
    magnitude are assigned to the zero block. The inertia of the result is
    what fixes the number of boundary conditions, so the threshold is an
    explicit argument.
    """
    res = sym_eigen(np.asarray(a, dtype=float))
    vals = res.eigenvalues
    vecs = res.eigenvectors
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    tol = zero_tol_rel * scale
    plus = vals > tol
    minus = vals < -tol
    zero = ~(plus | minus)
    m_plus = int(np.count_nonzero(plus))
    m_zero = int(np.count_nonzero(zero))
    m_minus = int(np.count_nonzero(minus))
    # sym_eigen sorts descending, so the (+, 0, -) blocks are already
    # contiguous in that order.
    z = np.hstack((vecs[:, plus], vecs[:, zero], vecs[:, minus]))
    return SignedFactorization(
        Z=z,
        Z_plus=vecs[:, plus],
        Z_zero=vecs[:, zero],
        Z_minus=vecs[:, minus],
        Delta_plus=vals[plus].copy(),
        Delta_minus=vals[minus].copy(),
        inertia=(m_plus, m_zero, m_minus),
    )


def omega_eigen(a: float, eps: float) -> float:
    """The value of omega that makes the scalar factorization orthogonal."""
    return math.hypot(a, 2.0 * eps)


def scalar_family(
    a: float, eps: float, omega: float, s1: float = 1.0, s2: float = 1.0
) -> SignedFactorization:
    """The omega-parameterized factorization of [[a, -eps], [-eps, 0]].

    Any omega > 0 and nonzero s1, s2 give a valid factorization with
    inertia (1, 0, 1); the scalings cancel from the final penalties. The
    symbolic limit omega -> inf exists only in the closed-form scalar
    penalties, not here.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if not math.isfinite(omega) or omega <= 0:
        raise InvalidOmegaError(
            f"omega must be a positive finite number, got {omega}"
        )
    if s1 == 0 or s2 == 0:
        raise ValueError("scalings s1 and s2 must be nonzero")
    z = np.array(
        [
            [(a + omega) / (2 * s1), (a - omega) / (2 * s2)],
            [-eps / s1, -eps / s2],
        ]
    )
    return SignedFactorization(
        Z=z,
        Z_plus=z[:, :1],
        Z_zero=z[:, 1:1],
        Z_minus=z[:, 1:],
        Delta_plus=np.array([s1 * s1 / omega]),
        Delta_minus=np.array([-s2 * s2 / omega]),
        inertia=(1, 0, 1),
    )


def scalar_eigen_family(a: float, eps: float) -> SignedFactorization:
    """The orthogonal member of the scalar factorization family."""
    omega = omega_eigen(a, eps)
    s1 = math.sqrt(omega * (omega + a) / 2.0)
    s2 = math.sqrt(omega * (omega - a) / 2.0)
    return scalar_family(a, eps, omega, s1, s2)


def _rotation_blocks(
    b: np.ndarray,
    fact: SignedFactorization,
    incoming_first: bool,
    side: str,
) -> tuple[np.ndarray, np.ndarray]:
    """Split B Z^{-T} into (P, R) for one boundary.

    ``incoming_first`` is True at the left boundary, where the incoming
    characteristics are the leading (positive) block; at the right boundary
    they are the trailing (negative) block.
    """
    m_plus, m_zero, m_minus = fact.inertia
    m_in = m_plus if incoming_first else m_minus
    m_out = m_minus if incoming_first else m_plus
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape != (m_in, fact.n):
        raise ShapeMismatchError(
            f"B_{side} must have shape ({m_in}, {fact.n}) for inertia "
            f"{fact.inertia}, got {b.shape}"
        )
    if m_in == 0:
        return np.zeros((0, 0)), np.zeros((0, m_out))
    t = lu_solve(fact.Z, b.T).T
    scale = float(np.max(np.abs(t)))
    if m_zero:
        zero_block = t[:, m_plus : m_plus + m_zero]
        if float(np.max(np.abs(zero_block))) > _ZERO_COLUMN_TOL * scale:
            raise InvalidZeroBlockError(
                f"B_{side} acts on zero-speed characteristics "
                f"(residual {float(np.max(np.abs(zero_block))):.3e} "
                f"relative to {scale:.3e})"
            )
    if incoming_first:
        p = t[:, :m_plus]
        rest = t[:, m_plus + m_zero :]
    else:
        p = t[:, m_plus + m_zero :]
        rest = t[:, :m_plus]
    try:
        r = lu_solve(p, rest, pivot_tol_rel=_SINGULAR_P_TOL)
    except SingularMatrixError as exc:
        raise SingularPError(
            f"P_{side} is numerically singular; the boundary conditions do "
            f"not control the incoming characteristics"
        ) from exc
    return p, r


def extract_rotation(
    b_left: np.ndarray,
    b_right: np.ndarray,
    fact: SignedFactorization,
    fact_right: SignedFactorization | None = None,
) -> BoundaryRotation:
    """Rotation data of both boundary operators.

    A separate factorization may be passed for the right boundary; by
    default both boundaries use the same one.
    """
    fl = fact
    fr = fact if fact_right is None else fact_right
    p_l, r_l = _rotation_blocks(b_left, fl, incoming_first=True, side="L")
    p_r, r_r = _rotation_blocks(b_right, fr, incoming_first=False, side="R")
    r_l_tilde = -(1.0 / fl.Delta_minus)[:, None] * (r_l.T * fl.Delta_plus[None, :])
    r_r_tilde = -(1.0 / fr.Delta_plus)[:, None] * (r_r.T * fr.Delta_minus[None, :])
    return BoundaryRotation(
        P_L=p_l,
        R_L=r_l,
        P_R=p_r,
        R_R=r_r,
        R_L_tilde=r_l_tilde,
        R_R_tilde=r_r_tilde,
    )


def dual_boundary_operators(
    fact: SignedFactorization,
    rot: BoundaryRotation,
    fact_right: SignedFactorization | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Dual boundary condition operators (B_L_tilde, B_R_tilde).

    The dual problem imposes m_minus conditions on the left and m_plus on
    the right; the scaling freedom is fixed by taking P_tilde = I.
    """
    fl = fact
    fr = fact if fact_right is None else fact_right
    b_l = fl.Z_minus.T + rot.R_L_tilde @ fl.Z_plus.T
    b_r = fr.Z_plus.T + rot.R_R_tilde @ fr.Z_minus.T
    return b_l, b_r


def _max_eig_or_none(c: np.ndarray) -> float | None:
    if c.size == 0:
        return None
    return float(np.max(sym_eigen(c).eigenvalues))


def check_wellposedness(
    fact: SignedFactorization,
    rot: BoundaryRotation,
    fact_right: SignedFactorization | None = None,
) -> WellPosednessReport:
    """Boundary dissipation check of the continuous problem.

    Builds C_L = Delta_minus + R_L^T Delta_plus R_L and
    C_R = -Delta_plus - R_R^T Delta_minus R_R plus their dual counterparts,
    and declares the problem well posed when the primal pair is negative
    semidefinite within tolerance. Empty blocks pass vacuously.
    """
    fl = fact
    fr = fact if fact_right is None else fact_right
    c_l = np.diag(fl.Delta_minus) + rot.R_L.T @ (
        fl.Delta_plus[:, None] * rot.R_L
    )
    c_r = -np.diag(fr.Delta_plus) - rot.R_R.T @ (
        fr.Delta_minus[:, None] * rot.R_R
    )
    c_l_dual = -np.diag(fl.Delta_plus) - (
        fl.Delta_plus[:, None] * rot.R_L
    ) @ ((1.0 / fl.Delta_minus)[:, None] * (rot.R_L.T * fl.Delta_plus[None, :]))
    c_r_dual = np.diag(fr.Delta_minus) + (
        fr.Delta_minus[:, None] * rot.R_R
    ) @ ((1.0 / fr.Delta_plus)[:, None] * (rot.R_R.T * fr.Delta_minus[None, :]))
    scale = 1.0
    for d in (fl.Delta_plus, fl.Delta_minus, fr.Delta_plus, fr.Delta_minus):
        if d.size:
            scale = max(scale, float(np.max(np.abs(d))))
    tol = _WELLPOSED_TOL * scale
    eigs = [_max_eig_or_none(c) for c in (c_l, c_r, c_l_dual, c_r_dual)]
    well_posed = all(e is None or e <= tol for e in eigs[:2])
    return WellPosednessReport(
        C_L=c_l,
        C_R=c_r,
        C_L_tilde=c_l_dual,
        C_R_tilde=c_r_dual,
        max_eig_left=eigs[0],
        max_eig_right=eigs[1],
        max_eig_left_dual=eigs[2],
        max_eig_right_dual=eigs[3],
        well_posed=well_posed,
    )
