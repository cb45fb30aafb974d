"""SAT penalty parameters that are simultaneously stable and dual consistent.

Hyperbolic problems use the penalty ansatz

    Sigma_0 = (Z_+ Pi_0 + Z_- Gamma_0) P_L^{-1},
    Sigma_N = (Z_+ Gamma_N + Z_- Pi_N) P_R^{-1},

where dual consistency pins Pi in terms of Gamma,

    Pi_0 = -Delta_+ - Delta_+ R_L Delta_-^{-1} Gamma_0,
    Pi_N =  Delta_- - Delta_- R_R Delta_+^{-1} Gamma_N,

and the particular member Gamma = 0 cancels the linear boundary deviation
term from the energy rate, giving Sigma_0 = -Z_+ Delta_+ P_L^{-1} and
Sigma_N = Z_- Delta_- P_R^{-1}.

Parabolic problems in first-order form carry a solution penalty mu and a
boundary-derivative penalty nu at each end; the stable and dual consistent
choice reads, with the Z-bar blocks split into top (Z1, Z3) and bottom
(Z2, Z4) halves,

    mu_0 = (-Z1 + q Z2) Dp (P_L + q K_L Z2 Dp)^{-1},   nu_0 =  Z2 Dp (...)^{-1},
    mu_N = ( Z3 + q Z4) Dm (P_R - q K_R Z4 Dm)^{-1},   nu_N = -Z4 Dm (...)^{-1},

where q is the SBP boundary constant of the second-derivative operator.
The scalar closed forms of these expressions, their omega -> inf limits,
and the deliberately dual-inconsistent comparison penalties are provided
alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DualityViolatedError,
    InvalidOmegaError,
    NotWellPosedError,
    ShapeMismatchError,
    SingularMatrixError,
    SingularPenaltyDenominatorError,
)
from .factorization import (
    BoundaryRotation,
    SignedFactorization,
    check_wellposedness,
    dual_boundary_operators,
)
from .linalg import lu_solve

__all__ = [
    "HyperbolicPenalties",
    "HyperbolicDualBlocks",
    "ParabolicPenalties",
    "BoundaryConditionSpec",
    "hyperbolic_theorem1",
    "hyperbolic_family",
    "hyperbolic_dual_penalties",
    "boundary_forms",
    "parabolic_theorem2",
    "scalar_penalties",
    "inconsistent_comparison_penalties",
]

_DUALITY_TOL = 1e-10
_DENOM_TOL = 1e-12


@dataclass(frozen=True)
class HyperbolicPenalties:
    """Primal and dual SAT penalties of a hyperbolic problem."""

    Sigma0: np.ndarray
    SigmaN: np.ndarray
    Pi0: np.ndarray
    Gamma0: np.ndarray
    PiN: np.ndarray
    GammaN: np.ndarray
    Sigma0_tilde: np.ndarray
    SigmaN_tilde: np.ndarray
    Pi0_tilde: np.ndarray
    Gamma0_tilde: np.ndarray
    PiN_tilde: np.ndarray
    GammaN_tilde: np.ndarray
    B_L_tilde: np.ndarray
    B_R_tilde: np.ndarray


@dataclass(frozen=True)
class HyperbolicDualBlocks:
    """Dual penalty blocks derived from an admissible primal set."""

    Sigma0_tilde: np.ndarray
    SigmaN_tilde: np.ndarray
    Pi0_tilde: np.ndarray
    Gamma0_tilde: np.ndarray
    PiN_tilde: np.ndarray
    GammaN_tilde: np.ndarray
    B_L_tilde: np.ndarray
    B_R_tilde: np.ndarray


@dataclass(frozen=True)
class ParabolicPenalties:
    """SAT penalties (mu, nu) of a parabolic problem at both boundaries."""

    mu0: np.ndarray
    nu0: np.ndarray
    muN: np.ndarray
    nuN: np.ndarray
    q_used: float
    flavor: str

    def to_dict(self) -> dict:
        return {
            "flavor": self.flavor,
            "q_used": float(self.q_used),
            "mu0": _matrix_17g(self.mu0),
            "nu0": _matrix_17g(self.nu0),
            "muN": _matrix_17g(self.muN),
            "nuN": _matrix_17g(self.nuN),
        }


def _matrix_17g(a: np.ndarray) -> list[list[str]]:
    return [["%.17g" % v for v in row] for row in np.atleast_2d(a)]


@dataclass(frozen=True)
class BoundaryConditionSpec:
    """Boundary operators H U + G (dU/dx) = g at both ends.

    G must factor through the diffusion matrix as G = K E; data g_L and g_R
    are callables of time (constants are wrapped by the assembly helpers).
    """

    H_L: np.ndarray
    G_L: np.ndarray
    H_R: np.ndarray
    G_R: np.ndarray
    K_L: np.ndarray
    K_R: np.ndarray
    g_L: Callable[[float], np.ndarray]
    g_R: Callable[[float], np.ndarray]

    def check_consistency(self, e_mat: np.ndarray, tol_rel: float = 1e-12) -> None:
        """Verify G = K E at both boundaries."""
        scale = max(float(np.max(np.abs(e_mat))), 1e-300)
        for name, g, k in (("left", self.G_L, self.K_L), ("right", self.G_R, self.K_R)):
            res = float(np.max(np.abs(g - k @ e_mat))) if g.size else 0.0
            if res > tol_rel * scale * max(1.0, float(np.max(np.abs(k), initial=0.0))):
                raise ShapeMismatchError(
                    f"{name} boundary violates G = K*E "
                    f"(residual {res:.3e} against scale {scale:.3e})"
                )


def _delta_scale(*facts: SignedFactorization) -> float:
    scale = 0.0
    for f in facts:
        for d in (f.Delta_plus, f.Delta_minus):
            if d.size:
                scale = max(scale, float(np.max(np.abs(d))))
    return scale if scale > 0 else 1.0


def _right_divide(numer: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """numer @ denom^{-1} via a transposed solve."""
    if denom.shape[0] == 0:
        return np.zeros((numer.shape[0], 0))
    return lu_solve(denom.T, numer.T).T


def hyperbolic_theorem1(
    fact: SignedFactorization,
    rot: BoundaryRotation,
    fact_right: SignedFactorization | None = None,
) -> HyperbolicPenalties:
    """The optimal stable and dual consistent hyperbolic penalties.

    This is the family member with Gamma = 0 at both boundaries; it is the
    unique choice that removes the linear boundary-deviation term from the
    energy rate. Raises NotWellPosedError when the continuous boundary
    matrices are not dissipative.
    """
    fl = fact
    fr = fact if fact_right is None else fact_right
    report = check_wellposedness(fact, rot, fact_right)
    if not report.well_posed:
        raise NotWellPosedError(
            f"continuous problem is not well posed "
            f"(max boundary eigenvalues {report.max_eig_left}, "
            f"{report.max_eig_right})"
        )
    m_plus = fl.inertia[0]
    m_minus = fr.inertia[2]
    gamma0 = np.zeros((fl.inertia[2], m_plus))
    gammaN = np.zeros((fr.inertia[0], m_minus))
    return hyperbolic_family(fact, rot, gamma0, gammaN, fact_right)


def hyperbolic_family(
    fact: SignedFactorization,
    rot: BoundaryRotation,
    gamma0: np.ndarray,
    gammaN: np.ndarray,
    fact_right: SignedFactorization | None = None,
) -> HyperbolicPenalties:
    """A dual consistent penalty family member for given Gamma blocks.

    The Pi blocks are pinned by the duality constraint; stability is not
    automatic for nonzero Gamma and must be checked through the boundary
    forms.
    """
    fl = fact
    fr = fact if fact_right is None else fact_right
    gamma0 = np.atleast_2d(np.asarray(gamma0, dtype=float))
    gammaN = np.atleast_2d(np.asarray(gammaN, dtype=float))
    if gamma0.shape != (fl.inertia[2], fl.inertia[0]):
        raise ShapeMismatchError(
            f"Gamma0 must have shape {(fl.inertia[2], fl.inertia[0])}, "
            f"got {gamma0.shape}"
        )
    if gammaN.shape != (fr.inertia[0], fr.inertia[2]):
        raise ShapeMismatchError(
            f"GammaN must have shape {(fr.inertia[0], fr.inertia[2])}, "
            f"got {gammaN.shape}"
        )
    pi0 = -np.diag(fl.Delta_plus) - (fl.Delta_plus[:, None] * rot.R_L) @ (
        (1.0 / fl.Delta_minus)[:, None] * gamma0
    )
    piN = np.diag(fr.Delta_minus) - (fr.Delta_minus[:, None] * rot.R_R) @ (
        (1.0 / fr.Delta_plus)[:, None] * gammaN
    )
    sigma0 = _right_divide(fl.Z_plus @ pi0 + fl.Z_minus @ gamma0, rot.P_L)
    sigmaN = _right_divide(fr.Z_plus @ gammaN + fr.Z_minus @ piN, rot.P_R)
    partial = HyperbolicPenalties(
        Sigma0=sigma0,
        SigmaN=sigmaN,
        Pi0=pi0,
        Gamma0=gamma0,
        PiN=piN,
        GammaN=gammaN,
        Sigma0_tilde=np.zeros((fl.n, fl.inertia[2])),
        SigmaN_tilde=np.zeros((fr.n, fr.inertia[0])),
        Pi0_tilde=np.zeros((fl.inertia[2],) * 2),
        Gamma0_tilde=gamma0.T,
        PiN_tilde=np.zeros((fr.inertia[0],) * 2),
        GammaN_tilde=gammaN.T,
        B_L_tilde=np.zeros((fl.inertia[2], fl.n)),
        B_R_tilde=np.zeros((fr.inertia[0], fr.n)),
    )
    dual = hyperbolic_dual_penalties(fact, rot, partial, fact_right)
    return HyperbolicPenalties(
        Sigma0=sigma0,
        SigmaN=sigmaN,
        Pi0=pi0,
        Gamma0=gamma0,
        PiN=piN,
        GammaN=gammaN,
        Sigma0_tilde=dual.Sigma0_tilde,
        SigmaN_tilde=dual.SigmaN_tilde,
        Pi0_tilde=dual.Pi0_tilde,
        Gamma0_tilde=dual.Gamma0_tilde,
        PiN_tilde=dual.PiN_tilde,
        GammaN_tilde=dual.GammaN_tilde,
        B_L_tilde=dual.B_L_tilde,
        B_R_tilde=dual.B_R_tilde,
    )


def hyperbolic_dual_penalties(
    fact: SignedFactorization,
    rot: BoundaryRotation,
    primal: HyperbolicPenalties,
    fact_right: SignedFactorization | None = None,
) -> HyperbolicDualBlocks:
    """Dual penalty blocks for an admissible primal penalty set.

    Raises DualityViolatedError when the primal Pi blocks do not satisfy
    the duality constraint, since the dual formulas are only meaningful
    for dual consistent primal penalties.
    """
    fl = fact
    fr = fact if fact_right is None else fact_right
    scale = _delta_scale(fl, fr)
    pi0_required = -np.diag(fl.Delta_plus) - (
        fl.Delta_plus[:, None] * rot.R_L
    ) @ ((1.0 / fl.Delta_minus)[:, None] * primal.Gamma0)
    piN_required = np.diag(fr.Delta_minus) - (
        fr.Delta_minus[:, None] * rot.R_R
    ) @ ((1.0 / fr.Delta_plus)[:, None] * primal.GammaN)
    res = 0.0
    if primal.Pi0.size:
        res = max(res, float(np.max(np.abs(primal.Pi0 - pi0_required))))
    if primal.PiN.size:
        res = max(res, float(np.max(np.abs(primal.PiN - piN_required))))
    if res > _DUALITY_TOL * scale:
        raise DualityViolatedError(
            f"primal penalties violate the duality constraint "
            f"(residual {res:.3e}, tolerance {_DUALITY_TOL * scale:.3e})"
        )
    gamma0_t = primal.Gamma0.T
    gammaN_t = primal.GammaN.T
    pi0_t = np.diag(fl.Delta_minus) - (
        fl.Delta_minus[:, None] * rot.R_L_tilde
    ) @ ((1.0 / fl.Delta_plus)[:, None] * gamma0_t)
    piN_t = -np.diag(fr.Delta_plus) - (
        fr.Delta_plus[:, None] * rot.R_R_tilde
    ) @ ((1.0 / fr.Delta_minus)[:, None] * gammaN_t)
    sigma0_t = fl.Z_plus @ gamma0_t + fl.Z_minus @ pi0_t
    sigmaN_t = fr.Z_plus @ piN_t + fr.Z_minus @ gammaN_t
    b_l_tilde, b_r_tilde = dual_boundary_operators(fact, rot, fact_right)
    return HyperbolicDualBlocks(
        Sigma0_tilde=sigma0_t,
        SigmaN_tilde=sigmaN_t,
        Pi0_tilde=pi0_t,
        Gamma0_tilde=gamma0_t,
        PiN_tilde=piN_t,
        GammaN_tilde=gammaN_t,
        B_L_tilde=b_l_tilde,
        B_R_tilde=b_r_tilde,
    )


def boundary_forms(
    a_mat: np.ndarray,
    b_left: np.ndarray,
    b_right: np.ndarray,
    sigma0: np.ndarray,
    sigmaN: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Discrete boundary energy forms (C_0, C_N).

    Stability of the semi-discretization requires both to be negative
    semidefinite.
    """
    c0 = a_mat + sigma0 @ b_left + b_left.T @ sigma0.T
    cN = -a_mat + sigmaN @ b_right + b_right.T @ sigmaN.T
    return c0, cN


def parabolic_theorem2(
    fact_bar: SignedFactorization,
    rot_bar: BoundaryRotation,
    k_left: np.ndarray,
    k_right: np.ndarray,
    q: float,
    fact_right: SignedFactorization | None = None,
) -> ParabolicPenalties:
    """Stable and dual consistent penalties of a parabolic problem.

    ``fact_bar`` factors the doubled boundary matrix [[A, -E], [-E, 0]];
    ``q`` is the boundary constant of the second-derivative operator the
    scheme will be assembled with.
    """
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    fl = fact_bar
    fr = fact_bar if fact_right is None else fact_right
    if fl.n % 2 != 0:
        raise ShapeMismatchError(
            f"the doubled boundary matrix must have even size, got {fl.n}"
        )
    n = fl.n // 2
    k_left = np.atleast_2d(np.asarray(k_left, dtype=float))
    k_right = np.atleast_2d(np.asarray(k_right, dtype=float))
    if k_left.shape != (fl.inertia[0], n):
        raise ShapeMismatchError(
            f"K_L must have shape {(fl.inertia[0], n)}, got {k_left.shape}"
        )
    if k_right.shape != (fr.inertia[2], n):
        raise ShapeMismatchError(
            f"K_R must have shape {(fr.inertia[2], n)}, got {k_right.shape}"
        )
    z1 = fl.Z_plus[:n, :]
    z2 = fl.Z_plus[n:, :]
    z3 = fr.Z_minus[:n, :]
    z4 = fr.Z_minus[n:, :]
    dp = fl.Delta_plus
    dm = fr.Delta_minus
    denom_l = rot_bar.P_L + q * k_left @ (z2 * dp[None, :])
    denom_r = rot_bar.P_R - q * k_right @ (z4 * dm[None, :])
    try:
        mu0 = _solve_penalty((-z1 + q * z2) * dp[None, :], denom_l)
        nu0 = _solve_penalty(z2 * dp[None, :], denom_l)
        muN = _solve_penalty((z3 + q * z4) * dm[None, :], denom_r)
        nuN = _solve_penalty(-z4 * dm[None, :], denom_r)
    except SingularMatrixError as exc:
        raise SingularPenaltyDenominatorError(
            "penalty denominator is numerically singular; the boundary "
            "conditions and q are incompatible"
        ) from exc
    return ParabolicPenalties(
        mu0=mu0, nu0=nu0, muN=muN, nuN=nuN, q_used=float(q), flavor="theorem2"
    )


def _solve_penalty(numer: np.ndarray, denom: np.ndarray) -> np.ndarray:
    if denom.shape[0] == 0:
        return np.zeros((numer.shape[0], 0))
    return lu_solve(denom.T, numer.T, pivot_tol_rel=_DENOM_TOL).T


def scalar_penalties(
    a: float,
    eps: float,
    alpha_l: float,
    beta_l: float,
    alpha_r: float,
    beta_r: float,
    omega: float,
    q: float,
) -> ParabolicPenalties:
    """Closed-form scalar advection-diffusion penalties.

    Boundary conditions are alpha*u + beta*u_x = g at each end, so the
    boundary operator row on (u, u_x) is [alpha, beta] and K = beta/eps.
    Any omega in (0, inf] is accepted; math.inf selects the limiting
    penalties, which require beta != 0 at both ends.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    if math.isnan(omega) or omega <= 0:
        raise InvalidOmegaError(
            f"omega must be positive (possibly math.inf), got {omega}"
        )
    if math.isinf(omega):
        if beta_l == 0 or beta_r == 0:
            raise SingularPenaltyDenominatorError(
                "the omega -> inf limit requires beta != 0 at both boundaries"
            )
        mu0, nu0 = eps / beta_l, 0.0
        muN, nuN = -eps / beta_r, 0.0
    else:
        denom_l = alpha_l + beta_l * (a - omega) / (2 * eps) - q * beta_l
        denom_r = alpha_r + beta_r * (a + omega) / (2 * eps) + q * beta_r
        scale_l = abs(alpha_l) + abs(beta_l) * ((abs(a) + omega) / (2 * eps) + q)
        scale_r = abs(alpha_r) + abs(beta_r) * ((abs(a) + omega) / (2 * eps) + q)
        if abs(denom_l) <= _DENOM_TOL * scale_l or abs(denom_r) <= _DENOM_TOL * scale_r:
            raise SingularPenaltyDenominatorError(
                f"scalar penalty denominators ({denom_l:.3e}, {denom_r:.3e}) "
                f"are numerically singular for omega = {omega}"
            )
        mu0 = (-(a + omega) / 2 - q * eps) / denom_l
        nu0 = -eps / denom_l
        muN = ((a - omega) / 2 - q * eps) / denom_r
        nuN = eps / denom_r
    return ParabolicPenalties(
        mu0=np.array([[mu0]]),
        nu0=np.array([[nu0]]),
        muN=np.array([[muN]]),
        nuN=np.array([[nuN]]),
        q_used=float(q),
        flavor="theorem2",
    )


def inconsistent_comparison_penalties(kind: str, **params: float) -> ParabolicPenalties:
    """Deliberately dual-inconsistent comparison penalties.

    ``method1`` (nu = 0) and ``method2`` (nu with flipped sign) are the
    classical Dirichlet penalties for the scalar problem, taken at their
    stability bounds; ``ns_alternative`` is the explicit stable alternative
    for the 3x3 wall-boundary system. All of them fail the duality
    constraints by a finite margin, which is the point of using them.
    """
    if kind == "method1":
        a, eps, q = params["a"], params["eps"], params["q"]
        vals = (-a / 2 - eps * q / 4, 0.0, a / 2 - eps * q / 4, 0.0)
    elif kind == "method2":
        a, eps = params["a"], params["eps"]
        vals = (-a / 2, eps, a / 2, -eps)
    elif kind == "ns_alternative":
        ubar = params["ubar"]
        a, b = params["a"], params["b"]
        eps, phi, psi = params["eps"], params["phi"], params["psi"]
        mu0 = np.array([[-a, 0.0], [0.0, 0.0], [-b, eps * psi]])
        nu0 = np.array([[0.0, 0.0], [eps * phi, 0.0], [0.0, 0.0]])
        muN = np.array([[ubar, a, 0.0], [0.0, ubar, 0.0], [0.0, b, ubar]])
        nuN = np.array(
            [[0.0, 0.0, 0.0], [0.0, -eps * phi, 0.0], [0.0, 0.0, -eps * psi]]
        )
        return ParabolicPenalties(
            mu0=mu0, nu0=nu0, muN=muN, nuN=nuN, q_used=0.0, flavor=kind
        )
    else:
        raise ValueError(
            f"unknown comparison kind {kind!r}; expected method1, method2 "
            f"or ns_alternative"
        )
    mu0, nu0, muN, nuN = vals
    return ParabolicPenalties(
        mu0=np.array([[mu0]]),
        nu0=np.array([[nu0]]),
        muN=np.array([[muN]]),
        nuN=np.array([[nuN]]),
        q_used=params.get("q", 0.0),
        flavor=kind,
    )
