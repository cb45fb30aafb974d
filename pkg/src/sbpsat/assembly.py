"""Assembly of semi-discrete systems and dual-consistency certification.

All schemes are written as U_t + L U = RHS(t), so every SAT term enters L
with a minus sign. State vectors are point-major: the n components at grid
point x_i occupy the slice [i*n, (i+1)*n), which makes a term D (x) C act
as ``kron(D, C)`` and the norm matrix as the diagonal ``repeat(H, n)``.

The primal parabolic operator is

    L = (D1 (x) A) - (D2 (x) E)
        - Hbar^{-1} (e_0 (x) mu_0 + S^T e_0 (x) nu_0)(e_0^T (x) H_L + e_0^T S (x) G_L)
        - Hbar^{-1} (e_N (x) mu_N + S^T e_N (x) nu_N)(e_N^T (x) H_R + e_N^T S (x) G_R),

and the dual operator flips the sign of the advective term and replaces
the penalties and boundary operators with their dual counterparts. For the
hyperbolic scheme the analogous replacement is (Sigma, B) -> (Sigma~, B~).

Dual consistency of a parabolic scheme is certified through the constraint
blocks

    M_L = [[H_L^T mu_0^T + A,  H_L^T nu_0^T + E],
           [G_L^T mu_0^T - E,  G_L^T nu_0^T    ]],

which must factor as [mu~_0; nu~_0] B~_L: every row of M_L has to lie in
the row space of the dual boundary operator (and symmetrically on the
right). The dual penalties themselves are only determined up to the free
dual rotation P~, so the certificate tests the row space rather than any
particular (mu~, nu~); the assembled dual scheme uses the least-squares
representative with P~ = I. Dual boundary data is kept at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NotSymmetricError, ShapeMismatchError
from .factorization import (
    SignedFactorization,
    dual_boundary_operators,
    extract_rotation,
    factor_symmetric,
)
from .linalg import general_eigenvalues, lu_solve, rank_with_tolerance, sym_eigen
from .operators import SbpOperatorSet
from .penalties import (
    BoundaryConditionSpec,
    HyperbolicPenalties,
    ParabolicPenalties,
    boundary_forms,
)

__all__ = [
    "ProblemSpec",
    "HyperbolicBoundarySpec",
    "SemiDiscreteSystem",
    "DualityCertificate",
    "build_abar",
    "assemble_hyperbolic",
    "assemble_parabolic",
    "assemble_dual",
    "discrete_adjoint",
    "parabolic_duality_blocks",
    "certify",
]

_SYMMETRY_TOL = 1e-12
_PSD_TOL = 1e-12
_DUALITY_TOL = 1e-10
_RANK_TOL = 1e-10
_ABAR_ZERO_TOL = 1e-14


@dataclass(frozen=True)
class HyperbolicBoundarySpec:
    """Characteristic boundary operators B_L U = g_L, B_R U = g_R."""

    B_L: np.ndarray
    B_R: np.ndarray
    g_L: Callable[[float], np.ndarray]
    g_R: Callable[[float], np.ndarray]


@dataclass(frozen=True)
class ProblemSpec:
    """Continuous problem data on the interval [x_L, x_R].

    Hyperbolic problems are U_t + R U + A U_x = F with boundary operators
    in a HyperbolicBoundarySpec; parabolic problems are
    U_t + A U_x - E U_xx = F with a BoundaryConditionSpec. ``forcing``,
    ``exact`` and ``u0`` return arrays of shape (n, len(x)).
    """

    kind: str
    n: int
    A: np.ndarray
    bc: object
    x_L: float
    x_R: float
    forcing: Callable[[np.ndarray, float], np.ndarray]
    R: np.ndarray | None = None
    E: np.ndarray | None = None
    exact: Callable[[np.ndarray, float], np.ndarray] | None = None
    u0: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("hyperbolic", "parabolic"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.n < 1:
            raise ValueError(f"system size must be positive, got {self.n}")
        if not self.x_R > self.x_L:
            raise ValueError(f"empty domain [{self.x_L}, {self.x_R}]")
        object.__setattr__(self, "A", _checked_symmetric("A", self.A, self.n))
        if self.kind == "hyperbolic":
            if self.E is not None:
                raise ValueError("hyperbolic problems take no diffusion matrix E")
            if not isinstance(self.bc, HyperbolicBoundarySpec):
                raise ValueError("hyperbolic problems need a HyperbolicBoundarySpec")
            r_mat = np.zeros((self.n, self.n)) if self.R is None else self.R
            r_mat = _checked_symmetric("R", r_mat, self.n)
            _check_psd("R", r_mat)
            object.__setattr__(self, "R", r_mat)
        else:
            if self.R is not None:
                raise ValueError("parabolic problems take no reaction matrix R")
            if self.E is None:
                raise ValueError("parabolic problems need a diffusion matrix E")
            if not isinstance(self.bc, BoundaryConditionSpec):
                raise ValueError("parabolic problems need a BoundaryConditionSpec")
            e_mat = _checked_symmetric("E", self.E, self.n)
            _check_psd("E", e_mat)
            object.__setattr__(self, "E", e_mat)

    @property
    def length(self) -> float:
        return self.x_R - self.x_L


def _checked_symmetric(name: str, a: np.ndarray, n: int) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (n, n):
        raise ShapeMismatchError(f"{name} must have shape {(n, n)}, got {a.shape}")
    scale = max(float(np.max(np.abs(a))), 1e-300)
    if float(np.max(np.abs(a - a.T))) > _SYMMETRY_TOL * scale:
        raise NotSymmetricError(f"{name} is not symmetric to {_SYMMETRY_TOL} relative")
    return (a + a.T) / 2.0


def _check_psd(name: str, a: np.ndarray) -> None:
    eig = sym_eigen(a)
    scale = max(float(np.max(np.abs(eig.eigenvalues))), 1e-300)
    if float(np.min(eig.eigenvalues)) < -_PSD_TOL * scale:
        raise ValueError(f"{name} must be positive semidefinite")


@dataclass(frozen=True)
class SemiDiscreteSystem:
    """Assembled scheme U_t + L U = rhs_builder(t)."""

    L: np.ndarray
    Hbar: np.ndarray
    rhs_builder: Callable[[float], np.ndarray]
    grid: np.ndarray
    opset: SbpOperatorSet
    problem: ProblemSpec
    penalties: object
    n: int

    @property
    def size(self) -> int:
        return self.L.shape[0]

    def flatten(self, samples: np.ndarray) -> np.ndarray:
        """Point-major vector from component-major samples (n, N+1)."""
        samples = np.asarray(samples, dtype=float)
        if samples.shape != (self.n, self.grid.size):
            raise ShapeMismatchError(
                f"samples must have shape {(self.n, self.grid.size)}, "
                f"got {samples.shape}"
            )
        return samples.T.ravel()

    def unflatten(self, state: np.ndarray) -> np.ndarray:
        """Component-major samples (n, N+1) from a point-major vector."""
        return np.asarray(state, dtype=float).reshape(self.grid.size, self.n).T


def build_abar(a_mat: np.ndarray, e_mat: np.ndarray) -> np.ndarray:
    """Doubled boundary matrix [[A, -E], [-E, 0]] of the first-order form."""
    a_mat = np.asarray(a_mat, dtype=float)
    e_mat = np.asarray(e_mat, dtype=float)
    if a_mat.shape != e_mat.shape or a_mat.ndim != 2 or a_mat.shape[0] != a_mat.shape[1]:
        raise ShapeMismatchError(
            f"A and E must be square with equal shapes, got {a_mat.shape} "
            f"and {e_mat.shape}"
        )
    n = a_mat.shape[0]
    return np.block([[a_mat, -e_mat], [-e_mat, np.zeros((n, n))]])


def _grid_for(problem: ProblemSpec, opset: SbpOperatorSet) -> np.ndarray:
    span = problem.length
    if abs(opset.h * opset.N - span) > 1e-12 * span:
        raise ShapeMismatchError(
            f"operator spacing h={opset.h} with N={opset.N} does not cover "
            f"the domain of length {span}"
        )
    return problem.x_L + opset.h * np.arange(opset.npoints)


def _sample_field(
    func: Callable[[np.ndarray, float], np.ndarray],
    grid: np.ndarray,
    t: float,
    n: int,
    name: str,
) -> np.ndarray:
    values = np.asarray(func(grid, t), dtype=float)
    if values.shape != (n, grid.size):
        raise ShapeMismatchError(
            f"{name} must return shape {(n, grid.size)}, got {values.shape}"
        )
    return values.T.ravel()


def _boundary_data(
    g: Callable[[float], np.ndarray], t: float, m: int, name: str
) -> np.ndarray:
    values = np.atleast_1d(np.asarray(g(t), dtype=float))
    if values.shape != (m,):
        raise ShapeMismatchError(
            f"{name}({t}) must return shape {(m,)}, got {values.shape}"
        )
    return values


def _check_shape(name: str, a: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape != shape:
        raise ShapeMismatchError(f"{name} must have shape {shape}, got {a.shape}")
    return a


def assemble_hyperbolic(
    problem: ProblemSpec,
    opset: SbpOperatorSet,
    pens: HyperbolicPenalties,
) -> SemiDiscreteSystem:
    """Primal hyperbolic scheme with characteristic SAT terms."""
    if problem.kind != "hyperbolic":
        raise ValueError(f"expected a hyperbolic problem, got {problem.kind!r}")
    bc = problem.bc
    n = problem.n
    grid = _grid_for(problem, opset)
    npts = opset.npoints
    m_plus = pens.Sigma0.shape[1]
    m_minus = pens.SigmaN.shape[1]
    b_left = _check_shape("B_L", bc.B_L, (m_plus, n))
    b_right = _check_shape("B_R", bc.B_R, (m_minus, n))
    sigma0 = _check_shape("Sigma0", pens.Sigma0, (n, m_plus))
    sigmaN = _check_shape("SigmaN", pens.SigmaN, (n, m_minus))

    e0 = np.zeros(npts)
    e0[0] = 1.0
    eN = np.zeros(npts)
    eN[-1] = 1.0
    hbar = np.repeat(opset.H, n)
    hbar_inv = 1.0 / hbar
    sat_in_l = np.kron(e0[:, None], sigma0)
    sat_out_l = np.kron(e0[None, :], b_left)
    sat_in_r = np.kron(eN[:, None], sigmaN)
    sat_out_r = np.kron(eN[None, :], b_right)

    l_mat = np.kron(np.eye(npts), problem.R) + np.kron(opset.D1, problem.A)
    l_mat -= hbar_inv[:, None] * (sat_in_l @ sat_out_l)
    l_mat -= hbar_inv[:, None] * (sat_in_r @ sat_out_r)

    def rhs_builder(t: float) -> np.ndarray:
        rhs = _sample_field(problem.forcing, grid, t, n, "forcing")
        rhs -= hbar_inv * (sat_in_l @ _boundary_data(bc.g_L, t, m_plus, "g_L"))
        rhs -= hbar_inv * (sat_in_r @ _boundary_data(bc.g_R, t, m_minus, "g_R"))
        return rhs

    return SemiDiscreteSystem(
        L=l_mat,
        Hbar=hbar,
        rhs_builder=rhs_builder,
        grid=grid,
        opset=opset,
        problem=problem,
        penalties=pens,
        n=n,
    )


def assemble_parabolic(
    problem: ProblemSpec,
    opset: SbpOperatorSet,
    pens: ParabolicPenalties,
) -> SemiDiscreteSystem:
    """Primal parabolic scheme with solution and derivative SAT terms."""
    if problem.kind != "parabolic":
        raise ValueError(f"expected a parabolic problem, got {problem.kind!r}")
    if opset.is_partial:
        raise ValueError("parabolic assembly needs a second-derivative operator set")
    bc = problem.bc
    bc.check_consistency(problem.E)
    n = problem.n
    grid = _grid_for(problem, opset)
    m_plus = pens.mu0.shape[1]
    m_minus = pens.muN.shape[1]
    h_left = _check_shape("H_L", bc.H_L, (m_plus, n))
    g_left = _check_shape("G_L", bc.G_L, (m_plus, n))
    h_right = _check_shape("H_R", bc.H_R, (m_minus, n))
    g_right = _check_shape("G_R", bc.G_R, (m_minus, n))
    mu0 = _check_shape("mu0", pens.mu0, (n, m_plus))
    nu0 = _check_shape("nu0", pens.nu0, (n, m_plus))
    muN = _check_shape("muN", pens.muN, (n, m_minus))
    nuN = _check_shape("nuN", pens.nuN, (n, m_minus))

    sat = _parabolic_sat_factors(opset, n, mu0, nu0, muN, nuN,
                                 h_left, g_left, h_right, g_right)
    sat_in_l, sat_out_l, sat_in_r, sat_out_r, hbar, hbar_inv = sat

    l_mat = np.kron(opset.D1, problem.A) - np.kron(opset.D2, problem.E)
    l_mat -= hbar_inv[:, None] * (sat_in_l @ sat_out_l)
    l_mat -= hbar_inv[:, None] * (sat_in_r @ sat_out_r)

    def rhs_builder(t: float) -> np.ndarray:
        rhs = _sample_field(problem.forcing, grid, t, n, "forcing")
        rhs -= hbar_inv * (sat_in_l @ _boundary_data(bc.g_L, t, m_plus, "g_L"))
        rhs -= hbar_inv * (sat_in_r @ _boundary_data(bc.g_R, t, m_minus, "g_R"))
        return rhs

    return SemiDiscreteSystem(
        L=l_mat,
        Hbar=hbar,
        rhs_builder=rhs_builder,
        grid=grid,
        opset=opset,
        problem=problem,
        penalties=pens,
        n=n,
    )


def _parabolic_sat_factors(opset, n, mu0, nu0, muN, nuN, h_left, g_left,
                           h_right, g_right):
    npts = opset.npoints
    e0 = np.zeros(npts)
    e0[0] = 1.0
    eN = np.zeros(npts)
    eN[-1] = 1.0
    s_row0 = opset.S[0]
    s_rowN = opset.S[-1]
    hbar = np.repeat(opset.H, n)
    sat_in_l = np.kron(e0[:, None], mu0) + np.kron(s_row0[:, None], nu0)
    sat_out_l = np.kron(e0[None, :], h_left) + np.kron(s_row0[None, :], g_left)
    sat_in_r = np.kron(eN[:, None], muN) + np.kron(s_rowN[:, None], nuN)
    sat_out_r = np.kron(eN[None, :], h_right) + np.kron(s_rowN[None, :], g_right)
    return sat_in_l, sat_out_l, sat_in_r, sat_out_r, hbar, 1.0 / hbar


def assemble_dual(
    problem: ProblemSpec,
    opset: SbpOperatorSet,
    pens: HyperbolicPenalties | ParabolicPenalties,
) -> SemiDiscreteSystem:
    """Dual scheme V_tau + L_dual V = RHS, integrated backwards in time.

    Dual boundary data is zero; the returned rhs_builder gives the zero
    vector and the dual forcing (the functional weight) is left to the
    caller. For parabolic problems the dual penalties are recovered from
    the duality constraint blocks by least squares against the dual
    boundary operators, which picks the representative with P~ = I.
    """
    n = problem.n
    grid = _grid_for(problem, opset)
    npts = opset.npoints
    hbar = np.repeat(opset.H, n)
    hbar_inv = 1.0 / hbar
    zero = np.zeros(npts * n)

    if problem.kind == "hyperbolic":
        if not isinstance(pens, HyperbolicPenalties):
            raise ValueError("hyperbolic dual assembly needs HyperbolicPenalties")
        e0 = np.zeros(npts)
        e0[0] = 1.0
        eN = np.zeros(npts)
        eN[-1] = 1.0
        sat_in_l = np.kron(e0[:, None], pens.Sigma0_tilde)
        sat_out_l = np.kron(e0[None, :], pens.B_L_tilde)
        sat_in_r = np.kron(eN[:, None], pens.SigmaN_tilde)
        sat_out_r = np.kron(eN[None, :], pens.B_R_tilde)
        l_dual = np.kron(np.eye(npts), problem.R) - np.kron(opset.D1, problem.A)
        l_dual -= hbar_inv[:, None] * (sat_in_l @ sat_out_l)
        l_dual -= hbar_inv[:, None] * (sat_in_r @ sat_out_r)
    else:
        if not isinstance(pens, ParabolicPenalties):
            raise ValueError("parabolic dual assembly needs ParabolicPenalties")
        if opset.is_partial:
            raise ValueError(
                "parabolic assembly needs a second-derivative operator set"
            )
        blocks = _parabolic_dual_blocks(problem, pens)
        mu0_t, nu0_t, h_l_t, g_l_t = blocks[0]
        muN_t, nuN_t, h_r_t, g_r_t = blocks[1]
        sat = _parabolic_sat_factors(opset, n, mu0_t, nu0_t, muN_t, nuN_t,
                                     h_l_t, g_l_t, h_r_t, g_r_t)
        sat_in_l, sat_out_l, sat_in_r, sat_out_r, hbar, hbar_inv = sat
        l_dual = -np.kron(opset.D1, problem.A) - np.kron(opset.D2, problem.E)
        l_dual -= hbar_inv[:, None] * (sat_in_l @ sat_out_l)
        l_dual -= hbar_inv[:, None] * (sat_in_r @ sat_out_r)

    return SemiDiscreteSystem(
        L=l_dual,
        Hbar=hbar,
        rhs_builder=lambda t: zero.copy(),
        grid=grid,
        opset=opset,
        problem=problem,
        penalties=pens,
        n=n,
    )


def discrete_adjoint(l_mat: np.ndarray, hbar: np.ndarray) -> np.ndarray:
    """Adjoint L* = Hbar^{-1} L^T Hbar with respect to the norm inner product."""
    hbar = np.asarray(hbar, dtype=float)
    return l_mat.T * (hbar[None, :] / hbar[:, None])


def parabolic_duality_blocks(
    a_mat: np.ndarray,
    e_mat: np.ndarray,
    bc: BoundaryConditionSpec,
    pens: ParabolicPenalties,
) -> tuple[np.ndarray, np.ndarray]:
    """Duality constraint blocks (M_L, M_R) of a parabolic penalty set."""
    m_l = np.block(
        [
            [bc.H_L.T @ pens.mu0.T + a_mat, bc.H_L.T @ pens.nu0.T + e_mat],
            [bc.G_L.T @ pens.mu0.T - e_mat, bc.G_L.T @ pens.nu0.T],
        ]
    )
    m_r = np.block(
        [
            [bc.H_R.T @ pens.muN.T - a_mat, bc.H_R.T @ pens.nuN.T - e_mat],
            [bc.G_R.T @ pens.muN.T + e_mat, bc.G_R.T @ pens.nuN.T],
        ]
    )
    return m_l, m_r


def _parabolic_boundary_environment(
    problem: ProblemSpec,
) -> tuple[SignedFactorization, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    bc = problem.bc
    abar = build_abar(problem.A, problem.E)
    # The doubled matrix carries physical eigenvalue pairs that scale like
    # norm(E)^2 / norm(A) and sit near 1e-12 * scale once the diffusion
    # drops to 1e-6, while exact zeros land below 1e-15 * scale. A tighter
    # threshold than the factor_symmetric default keeps those viscous
    # eigenvalues out of the zero block, which would otherwise corrupt the
    # inertia and hence the boundary-condition counts.
    fact = factor_symmetric(abar, zero_tol_rel=_ABAR_ZERO_TOL)
    b_left = np.hstack([bc.H_L, bc.G_L])
    b_right = np.hstack([bc.H_R, bc.G_R])
    rot = extract_rotation(b_left, b_right, fact)
    bt_left, bt_right = dual_boundary_operators(fact, rot)
    # The parabolic duality pairing on (V, V_x) is [[A, E], [-E, 0]], which
    # equals Abar times diag(I, -I); the boundary operators of the dual
    # problem are therefore the hyperbolic ones with the derivative block
    # negated.
    n = problem.n
    bt_left = np.hstack([bt_left[:, :n], -bt_left[:, n:]])
    bt_right = np.hstack([bt_right[:, :n], -bt_right[:, n:]])
    return fact, rot, b_left, b_right, bt_left, bt_right


def _parabolic_dual_blocks(problem: ProblemSpec, pens: ParabolicPenalties):
    """Least-squares dual penalties and dual boundary operators per side."""
    n = problem.n
    _, _, _, _, bt_left, bt_right = _parabolic_boundary_environment(problem)
    m_l, m_r = parabolic_duality_blocks(problem.A, problem.E, problem.bc, pens)
    x_l, *_ = np.linalg.lstsq(bt_left.T, m_l.T, rcond=None)
    x_r, *_ = np.linalg.lstsq(bt_right.T, m_r.T, rcond=None)
    x_l = x_l.T
    x_r = x_r.T
    left = (x_l[:n], x_l[n:], bt_left[:, :n], bt_left[:, n:])
    right = (x_r[:n], x_r[n:], bt_right[:, :n], bt_right[:, n:])
    return left, right


@dataclass(frozen=True)
class DualityCertificate:
    """Outcome of the combined duality and stability checks of one scheme."""

    scheme: str
    kind: str
    verdict: str
    duality_left: float | None
    duality_right: float | None
    matrix_equality_residual: float | None
    rank_left: int | None
    rank_right: int | None
    rank_bound_left: int | None
    rank_bound_right: int | None
    boundary_form_left_max_eig: float | None
    boundary_form_right_max_eig: float | None
    rho: float | None
    eta: float | None

    def to_dict(self) -> dict:
        return {
            "config": {"scheme": self.scheme, "kind": self.kind},
            "residuals": {
                "duality_left": self.duality_left,
                "duality_right": self.duality_right,
                "stability_min_re": self.eta,
                "rho": self.rho,
                "eta": self.eta,
            },
            "verdict": self.verdict,
        }


def _scheme_id(problem: ProblemSpec, opset: SbpOperatorSet, flavor: str) -> str:
    return (
        f"{problem.kind} order=({opset.order.interior_order},{opset.order.p}) "
        f"variant={opset.variant} N={opset.N} flavor={flavor}"
    )


def certify(
    problem: ProblemSpec,
    opset: SbpOperatorSet,
    pens: HyperbolicPenalties | ParabolicPenalties,
) -> DualityCertificate:
    """Certify dual consistency and stability of an assembled scheme.

    The certificate never raises on a failed check; the verdict is
    ``dual_consistent``, ``dual_inconsistent`` or ``empty_problem``.
    """
    a_zero = float(np.max(np.abs(problem.A))) == 0.0
    e_zero = problem.E is None or float(np.max(np.abs(problem.E))) == 0.0
    flavor = getattr(pens, "flavor", "theorem1")
    scheme = _scheme_id(problem, opset, flavor)
    if a_zero and e_zero:
        return DualityCertificate(
            scheme=scheme,
            kind=problem.kind,
            verdict="empty_problem",
            duality_left=None,
            duality_right=None,
            matrix_equality_residual=None,
            rank_left=None,
            rank_right=None,
            rank_bound_left=None,
            rank_bound_right=None,
            boundary_form_left_max_eig=None,
            boundary_form_right_max_eig=None,
            rho=None,
            eta=None,
        )
    if problem.kind == "hyperbolic":
        return _certify_hyperbolic(problem, opset, pens, scheme)
    return _certify_parabolic(problem, opset, pens, scheme)


def _spectrum_summary(l_mat: np.ndarray) -> tuple[float, float]:
    eig = general_eigenvalues(l_mat)
    rho = float(np.max(np.abs(eig.eigenvalues)))
    eta = float(np.min(eig.eigenvalues.real))
    return rho, eta


def _max_sym_eig(c: np.ndarray) -> float | None:
    if c.size == 0:
        return None
    return float(sym_eigen((c + c.T) / 2.0).eigenvalues[0])


def _certify_hyperbolic(
    problem: ProblemSpec,
    opset: SbpOperatorSet,
    pens: HyperbolicPenalties,
    scheme: str,
) -> DualityCertificate:
    bc = problem.bc
    a_mat = problem.A
    res_l = bc.B_L.T @ pens.Sigma0.T + a_mat - pens.Sigma0_tilde @ pens.B_L_tilde
    res_r = bc.B_R.T @ pens.SigmaN.T - a_mat - pens.SigmaN_tilde @ pens.B_R_tilde
    duality_left = float(np.max(np.abs(res_l)))
    duality_right = float(np.max(np.abs(res_r)))
    scale = max(float(np.max(np.abs(a_mat))), 1.0)

    primal = assemble_hyperbolic(problem, opset, pens)
    dual = assemble_dual(problem, opset, pens)
    adjoint = discrete_adjoint(primal.L, primal.Hbar)
    matrix_residual = float(np.max(np.abs(adjoint - dual.L)))
    l_scale = max(float(np.max(np.abs(primal.L))), 1.0)

    c0, cN = boundary_forms(a_mat, bc.B_L, bc.B_R, pens.Sigma0, pens.SigmaN)
    rho, eta = _spectrum_summary(primal.L)
    consistent = (
        duality_left <= _DUALITY_TOL * scale
        and duality_right <= _DUALITY_TOL * scale
        and matrix_residual <= 1e-12 * l_scale
    )
    return DualityCertificate(
        scheme=scheme,
        kind="hyperbolic",
        verdict="dual_consistent" if consistent else "dual_inconsistent",
        duality_left=duality_left,
        duality_right=duality_right,
        matrix_equality_residual=matrix_residual,
        rank_left=None,
        rank_right=None,
        rank_bound_left=None,
        rank_bound_right=None,
        boundary_form_left_max_eig=_max_sym_eig(c0),
        boundary_form_right_max_eig=_max_sym_eig(cN),
        rho=rho,
        eta=eta,
    )


def _certify_parabolic(
    problem: ProblemSpec,
    opset: SbpOperatorSet,
    pens: ParabolicPenalties,
    scheme: str,
) -> DualityCertificate:
    fact, rot, b_left, b_right, bt_left, bt_right = _parabolic_boundary_environment(
        problem
    )
    m_l, m_r = parabolic_duality_blocks(problem.A, problem.E, problem.bc, pens)
    x_l, *_ = np.linalg.lstsq(bt_left.T, m_l.T, rcond=None)
    x_r, *_ = np.linalg.lstsq(bt_right.T, m_r.T, rcond=None)
    duality_left = float(np.max(np.abs(m_l - x_l.T @ bt_left)))
    duality_right = float(np.max(np.abs(m_r - x_r.T @ bt_right)))
    scale_l = max(float(np.max(np.abs(m_l))), 1e-300)
    scale_r = max(float(np.max(np.abs(m_r))), 1e-300)
    rank_left = rank_with_tolerance(m_l, _RANK_TOL)
    rank_right = rank_with_tolerance(m_r, _RANK_TOL)
    m_minus = fact.inertia[2]
    m_plus = fact.inertia[0]

    abar = build_abar(problem.A, problem.E)
    sigma0_bar = -_right_divide(fact.Z_plus * fact.Delta_plus[None, :], rot.P_L)
    sigmaN_bar = _right_divide(fact.Z_minus * fact.Delta_minus[None, :], rot.P_R)
    c0, cN = boundary_forms(abar, b_left, b_right, sigma0_bar, sigmaN_bar)

    primal = assemble_parabolic(problem, opset, pens)
    rho, eta = _spectrum_summary(primal.L)
    consistent = (
        duality_left <= _DUALITY_TOL * scale_l
        and duality_right <= _DUALITY_TOL * scale_r
        and rank_left <= m_minus
        and rank_right <= m_plus
    )
    return DualityCertificate(
        scheme=scheme,
        kind="parabolic",
        verdict="dual_consistent" if consistent else "dual_inconsistent",
        duality_left=duality_left,
        duality_right=duality_right,
        matrix_equality_residual=None,
        rank_left=rank_left,
        rank_right=rank_right,
        rank_bound_left=m_minus,
        rank_bound_right=m_plus,
        boundary_form_left_max_eig=_max_sym_eig(c0),
        boundary_form_right_max_eig=_max_sym_eig(cN),
        rho=rho,
        eta=eta,
    )


def _right_divide(numer: np.ndarray, denom: np.ndarray) -> np.ndarray:
    if denom.shape[0] == 0:
        return np.zeros((numer.shape[0], 0))
    return lu_solve(denom.T, numer.T).T
