"""Diagonal-norm SBP derivative operators and their boundary constants.

Construction convention
-----------------------
All operators are assembled in normalized units (h = 1) from the literal
coefficient tables in ``_coefficients`` and scaled to the physical grid
spacing afterwards:

* ``H = h * diag(Hnorm)`` with the boundary weights mirrored at the right end,
* ``Q`` is an antisymmetric band plus overwritten boundary corners plus
  ``(E_N - E_0)/2`` on the two corner diagonal entries, so the SBP identity
  ``Q + Q^T = E_N - E_0`` holds exactly in floating point,
* ``A_S`` is a symmetric band plus overwritten boundary corners, mirrored
  without sign change at the right end, scaled by ``1/h``,
* ``S`` is the identity except for the one-sided derivative rows 0 and N
  (scaled ``1/h``); row N is the negated reverse of row 0,
* ``D1 = H^{-1} Q`` and ``D2 = H^{-1}(-A_S + (E_N - E_0) S)``.

The ``wide`` variant instead derives everything from the first-derivative
operator: ``D2 = D1 @ D1``, ``S = D1`` and ``A_S = D1^T H D1``. The
``narrow_20`` variant keeps the second-order ``H``, ``D1`` and ``A_S`` but
uses first-order boundary derivative rows, which zeroes the first and last
rows of ``D2``.

The boundary constant q is obtained from the corners of
``S (A_S + delta*E_0)^{-1} S^T``; by construction those corners do not
depend on delta, so the default delta = 1 is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _coefficients as coeff
from .errors import (
    GridTooSmallError,
    SingularMatrixError,
    SingularPerturbedMatrixError,
    UnknownVariantError,
)
from .linalg import lu_solve_refined, sym_eigen

__all__ = [
    "VARIANTS",
    "OperatorOrder",
    "SbpOperatorSet",
    "build_first_derivative",
    "build_second_derivative",
    "compute_q",
    "corner_constants",
    "verify_sbp",
    "dump_matrix",
    "dump_operator_set",
]

VARIANTS = ("wide", "narrow", "narrow_20")

_INTERIOR_ORDERS = (2, 4, 6, 8)

# Entrywise tolerance factors for the verification report.
_TOL_SBP_IDENTITY = 1e-13
_TOL_AS_SYMMETRY = 1e-13
_TOL_AS_PSD = 1e-10
_TOL_D2_IDENTITY = 1e-12
_TOL_ROW_EXACTNESS = 1e-11
_TOL_QUADRATURE = 1e-12
_TOL_Q_SYMMETRY = 1e-12
_TOL_WIDE_DEGENERACY = 1e-13


@dataclass(frozen=True)
class OperatorOrder:
    """Interior accuracy order of an SBP family, 2p with p in {1,2,3,4}."""

    interior_order: int

    def __post_init__(self) -> None:
        if self.interior_order not in _INTERIOR_ORDERS:
            raise ValueError(
                f"interior_order must be one of {_INTERIOR_ORDERS}, "
                f"got {self.interior_order}"
            )

    @property
    def p(self) -> int:
        return self.interior_order // 2

    def boundary_order(self, variant: str) -> int:
        """Boundary accuracy order of the second-derivative family."""
        _check_variant(variant)
        if variant == "narrow":
            return self.p
        if variant == "wide":
            return self.p - 1
        return 0


def _as_order(order: OperatorOrder | int) -> OperatorOrder:
    if isinstance(order, OperatorOrder):
        return order
    return OperatorOrder(int(order))


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise UnknownVariantError(
            f"unknown variant {variant!r}, expected one of {VARIANTS}"
        )


@dataclass(frozen=True)
class SbpOperatorSet:
    """An SBP operator family instantiated on a concrete grid.

    ``N`` is the index of the last grid point (N+1 points in total) and the
    grid is x_i = x_L + i*h for any left endpoint x_L. Partial sets built by
    ``build_first_derivative`` carry only ``H``, ``Q``, ``D1`` and ``q_hat``;
    the second-derivative fields are None.
    """

    order: OperatorOrder
    variant: str
    N: int
    h: float
    H: np.ndarray
    Q: np.ndarray
    D1: np.ndarray
    q_hat: float
    D2: np.ndarray | None = None
    S: np.ndarray | None = None
    A_S: np.ndarray | None = None
    q0: float | None = None
    qN: float | None = None
    qc: float | None = None
    q: float | None = None

    @property
    def npoints(self) -> int:
        return self.N + 1

    @property
    def is_partial(self) -> bool:
        return self.D2 is None


def _check_grid(p: int, N: int) -> None:
    width = coeff.CLOSURE_WIDTH[p]
    if N < 2 * width:
        raise GridTooSmallError(
            f"N = {N} is too small for closure width {width}; need N >= {2 * width}"
        )


def _h_diag_norm(p: int, N: int) -> np.ndarray:
    d = np.ones(N + 1)
    bnd = np.array([float(v) for v in coeff.H_BOUNDARY[p]])
    d[: len(bnd)] = bnd
    d[N + 1 - len(bnd) :] = bnd[::-1]
    return d


def _q_matrix_norm(p: int, N: int) -> np.ndarray:
    b = np.zeros((N + 1, N + 1))
    for dist, a in enumerate(coeff.D1_INTERIOR[p], start=1):
        b += float(a) * (np.eye(N + 1, k=dist) - np.eye(N + 1, k=-dist))
    w = coeff.CLOSURE_WIDTH[p]
    for (i, j), v in coeff.Q_CORNER[p].items():
        if i < w and j < w:
            b[i, j] = float(v)
            b[j, i] = -float(v)
    for i in range(w):
        for j in range(w):
            b[N - i, N - j] = -b[i, j]
    b[0, 0] -= 0.5
    b[N, N] += 0.5
    return b


def _a_matrix_norm(p: int, N: int) -> np.ndarray:
    stencil = coeff.D2_INTERIOR[p]
    a = np.zeros((N + 1, N + 1))
    for off in range(-p, p + 1):
        a += -float(stencil[p + off]) * np.eye(N + 1, k=off)
    w = coeff.AS_WIDTH[p]
    for (i, j), v in coeff.AS_CORNER[p].items():
        a[i, j] = float(v)
        a[j, i] = float(v)
    for i in range(w):
        for j in range(w):
            a[N - i, N - j] = a[i, j]
    return a


def _s_matrix(p: int, N: int, h: float, first_order: bool) -> np.ndarray:
    s = np.eye(N + 1)
    src = coeff.S_ROW0_FIRST_ORDER if first_order else coeff.S_ROW0[p]
    row = np.array([float(v) for v in src])
    k = len(row)
    s[0, :] = 0.0
    s[0, :k] = row / h
    s[N, :] = 0.0
    s[N, N + 1 - k :] = -row[::-1] / h
    return s


def build_first_derivative(
    order: OperatorOrder | int, N: int, h: float
) -> SbpOperatorSet:
    """First-derivative SBP set (H, Q, D1) of the requested family.

    The returned set is partial: second-derivative fields are None.
    """
    order = _as_order(order)
    if h <= 0:
        raise ValueError(f"grid spacing must be positive, got h = {h}")
    _check_grid(order.p, N)
    hd = _h_diag_norm(order.p, N)
    q = _q_matrix_norm(order.p, N)
    d1 = q / (h * hd[:, None])
    return SbpOperatorSet(
        order=order,
        variant="narrow",
        N=N,
        h=float(h),
        H=h * hd,
        Q=q,
        D1=d1,
        q_hat=1.0 / (h * hd[0]),
    )


def build_second_derivative(
    order: OperatorOrder | int, variant: str, N: int, h: float
) -> SbpOperatorSet:
    """Full SBP operator set (H, Q, D1, D2, S, A_S) plus boundary constants."""
    order = _as_order(order)
    _check_variant(variant)
    if variant == "narrow_20" and order.interior_order != 2:
        raise UnknownVariantError(
            "variant 'narrow_20' exists only for interior order 2, "
            f"got {order.interior_order}"
        )
    base = build_first_derivative(order, N, h)
    p = order.p

    if variant == "wide":
        d2 = base.D1 @ base.D1
        s = base.D1
        t = base.D1.T @ (base.H[:, None] * base.D1)
        a_s = (t + t.T) / 2.0
        partial = SbpOperatorSet(
            order=order,
            variant=variant,
            N=N,
            h=base.h,
            H=base.H,
            Q=base.Q,
            D1=base.D1,
            q_hat=base.q_hat,
            D2=d2,
            S=s,
            A_S=a_s,
        )
    else:
        a_s = _a_matrix_norm(p, N) / h
        s = _s_matrix(p, N, h, first_order=(variant == "narrow_20"))
        es = np.zeros((N + 1, N + 1))
        es[0, :] = -s[0, :]
        es[N, :] = s[N, :]
        hd = base.H
        d2 = (-a_s + es) / hd[:, None]
        partial = SbpOperatorSet(
            order=order,
            variant=variant,
            N=N,
            h=base.h,
            H=base.H,
            Q=base.Q,
            D1=base.D1,
            q_hat=base.q_hat,
            D2=d2,
            S=s,
            A_S=a_s,
        )

    q0, qN, qc, q = compute_q(partial)
    return SbpOperatorSet(
        order=order,
        variant=variant,
        N=N,
        h=base.h,
        H=base.H,
        Q=base.Q,
        D1=base.D1,
        q_hat=base.q_hat,
        D2=partial.D2,
        S=partial.S,
        A_S=partial.A_S,
        q0=q0,
        qN=qN,
        qc=qc,
        q=q,
    )


def corner_constants(
    a_s: np.ndarray, s: np.ndarray, delta: float = 1.0
) -> tuple[float, float, float]:
    """Corners (0,0), (N,N) and (0,N) of ``S (A_S + delta*E_j)^{-1} S^T``.

    The corners are independent of both delta and the perturbation index j
    whenever (A_S, S) satisfy the SBP second-derivative structure, which is
    what makes the boundary constant q well defined. Each end therefore uses
    the perturbation at its own corner (j = 0 for q0, j = N for qN): the two
    computations then mirror each other exactly and the identity q0 = qN
    survives in floating point, which a single shared perturbation does not
    guarantee for the large order-8 closure coefficients.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    n = a_s.shape[0] - 1
    a0 = np.array(a_s, dtype=float)
    a0[0, 0] += delta
    aN = np.array(a_s, dtype=float)
    aN[n, n] += delta
    try:
        y0 = lu_solve_refined(a0, s[0, :])
        yN = lu_solve_refined(aN, s[n, :])
    except SingularMatrixError as exc:
        raise SingularPerturbedMatrixError(
            "A_S + delta*E_j is singular; the input does not have the "
            "SBP second-derivative structure"
        ) from exc
    q0 = float(s[0, :] @ y0)
    qN = float(s[n, :] @ yN)
    qc = float(s[n, :] @ y0)
    return q0, qN, qc


def compute_q(
    opset: SbpOperatorSet, delta: float = 1.0
) -> tuple[float, float, float, float]:
    """Boundary constants (q0, qN, qc, q) of an operator set.

    For the wide variant q equals e_0^T H^{-1} e_0 exactly, so no solve is
    needed. For the narrow variants the constants come from the corners of
    ``S (A_S + delta*E_0)^{-1} S^T`` and q = q0 + |qc|.
    """
    if opset.A_S is None or opset.S is None:
        raise ValueError("compute_q requires a full operator set with A_S and S")
    if opset.variant == "wide":
        return opset.q_hat, opset.q_hat, 0.0, opset.q_hat
    q0, qN, qc = corner_constants(opset.A_S, opset.S, delta)
    return q0, qN, qc, q0 + abs(qc)


def _poly_row_residual(
    m: np.ndarray, x: np.ndarray, k: int, rhs: np.ndarray, rows: np.ndarray
) -> float:
    """Largest row residual of ``M x^k - rhs`` relative to a roundoff scale.

    The per-row scale sums the absolute terms entering the row product, so a
    residual of a few machine epsilons passes regardless of h or N.
    """
    if rows.size == 0:
        return 0.0
    xk = x**k
    res = np.abs(m[rows, :] @ xk - rhs[rows])
    scale = np.abs(m[rows, :]) @ np.abs(xk) + np.abs(rhs[rows]) + 1.0
    return float(np.max(res / scale))


def _accuracy_checks(opset: SbpOperatorSet) -> list[dict]:
    n1 = opset.npoints
    p = opset.order.p
    w = coeff.CLOSURE_WIDTH[p]
    x = opset.h * np.arange(n1)
    checks = []

    def split_rows(width: int) -> tuple[np.ndarray, np.ndarray]:
        edge = np.concatenate((np.arange(width), np.arange(n1 - width, n1)))
        inner = np.arange(width, n1 - width)
        return edge, inner

    d1_edge, d1_inner = split_rows(w)
    worst = 0.0
    for k in range(2 * p + 1):
        rhs = k * x ** (k - 1) if k >= 1 else np.zeros(n1)
        worst = max(worst, _poly_row_residual(opset.D1, x, k, rhs, d1_inner))
        if k <= p:
            worst = max(worst, _poly_row_residual(opset.D1, x, k, rhs, d1_edge))
    checks.append(_mkcheck("d1_accuracy", worst, _TOL_ROW_EXACTNESS))

    if opset.is_partial:
        return checks

    bdeg = opset.order.boundary_order(opset.variant) + 1
    d2_width = w + p if opset.variant == "wide" else w
    d2_edge, d2_inner = split_rows(d2_width)
    worst = 0.0
    for k in range(2 * p + 1):
        rhs = k * (k - 1) * x ** (k - 2) if k >= 2 else np.zeros(n1)
        worst = max(worst, _poly_row_residual(opset.D2, x, k, rhs, d2_inner))
        if k <= bdeg:
            worst = max(worst, _poly_row_residual(opset.D2, x, k, rhs, d2_edge))
    checks.append(_mkcheck("d2_accuracy", worst, _TOL_ROW_EXACTNESS))

    s_rows = np.array([0, opset.N])
    worst = 0.0
    for k in range(bdeg + 1):
        rhs = k * x ** (k - 1) if k >= 1 else np.zeros(n1)
        worst = max(worst, _poly_row_residual(opset.S, x, k, rhs, s_rows))
    checks.append(_mkcheck("s_accuracy", worst, _TOL_ROW_EXACTNESS))
    return checks


def _mkcheck(name: str, residual: float, tol: float) -> dict:
    return {
        "name": name,
        "residual": float(residual),
        "tol": float(tol),
        "passed": bool(residual <= tol),
    }


def verify_sbp(opset: SbpOperatorSet) -> dict:
    """Check all structural SBP identities and accuracy orders of a set.

    Returns a report dict with one entry per check (name, measured residual,
    tolerance, pass flag) and an overall ``passed`` flag. Nothing is raised;
    injected faults show up as failed checks.
    """
    n1 = opset.npoints
    p = opset.order.p
    checks = []

    e_diff = np.zeros((n1, n1))
    e_diff[0, 0] = -1.0
    e_diff[-1, -1] = 1.0

    res = float(np.max(np.abs(opset.Q + opset.Q.T - e_diff)))
    checks.append(_mkcheck("sbp_identity", res, _TOL_SBP_IDENTITY / opset.h))

    hmin = float(np.min(opset.H))
    checks.append(
        {
            "name": "h_positive",
            "residual": hmin,
            "tol": 0.0,
            "passed": bool(hmin > 0.0),
        }
    )

    res = float(np.max(np.abs(opset.H[:, None] * opset.D1 - opset.Q)))
    checks.append(_mkcheck("d1_identity", res, _TOL_SBP_IDENTITY / opset.h))

    x = opset.h * np.arange(n1)
    length = opset.h * opset.N
    worst = 0.0
    for k in range(2 * p):
        exact = length ** (k + 1) / (k + 1)
        worst = max(worst, abs(float(opset.H @ x**k) - exact) / abs(exact))
    checks.append(_mkcheck("h_quadrature", worst, _TOL_QUADRATURE))

    if not opset.is_partial:
        res = float(np.max(np.abs(opset.A_S - opset.A_S.T)))
        checks.append(_mkcheck("as_symmetry", res, _TOL_AS_SYMMETRY / opset.h))

        eig = sym_eigen(opset.A_S).eigenvalues
        scale = float(np.max(np.abs(eig))) if eig.size else 0.0
        min_eig = float(np.min(eig))
        checks.append(
            {
                "name": "as_psd",
                "residual": min_eig,
                "tol": -_TOL_AS_PSD * scale,
                "passed": bool(min_eig >= -_TOL_AS_PSD * scale),
            }
        )

        es = np.zeros((n1, n1))
        es[0, :] = -opset.S[0, :]
        es[-1, :] = opset.S[-1, :]
        lhs = opset.H[:, None] * opset.D2
        rhs = -opset.A_S + es
        scale = float(np.max(np.abs(opset.A_S)) + np.max(np.abs(es)))
        res = float(np.max(np.abs(lhs - rhs)))
        checks.append(_mkcheck("d2_identity", res, _TOL_D2_IDENTITY * scale))

        q0, qN, qc, q = compute_q(opset)
        checks.append(
            _mkcheck("q_symmetry", abs(q0 - qN), _TOL_Q_SYMMETRY * abs(q))
        )

        if opset.variant == "wide":
            # With S = D1 the corner split (q0, qc) is not unique, but the
            # combination q0 + |qc| still collapses to e_0^T H^{-1} e_0.
            d0, dN, dc = corner_constants(opset.A_S, opset.S)
            res = max(abs(d0 + abs(dc) - opset.q_hat), abs(dN + abs(dc) - opset.q_hat))
            checks.append(
                _mkcheck("wide_degeneracy", res, _TOL_WIDE_DEGENERACY * opset.q_hat)
            )

    checks.extend(_accuracy_checks(opset))
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def dump_matrix(a: np.ndarray) -> str:
    """Plain-text dump, one row per line, 17 significant digits."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return "\n".join(" ".join("%.17g" % v for v in row) for row in a)


def dump_operator_set(opset: SbpOperatorSet) -> str:
    """Dump all matrices of a set with one header line per block."""
    parts = [
        f"# sbp order={opset.order.interior_order} variant={opset.variant} "
        f"N={opset.N} h={'%.17g' % opset.h}"
    ]
    blocks = [("H", opset.H), ("Q", opset.Q), ("D1", opset.D1)]
    if not opset.is_partial:
        blocks += [("D2", opset.D2), ("S", opset.S), ("A_S", opset.A_S)]
    for name, mat in blocks:
        parts.append(f"# {name}")
        parts.append(dump_matrix(mat))
    scalars = ["q_hat"] if opset.is_partial else ["q_hat", "q0", "qN", "qc", "q"]
    for name in scalars:
        parts.append(f"# {name} = {'%.17g' % getattr(opset, name)}")
    return "\n".join(parts) + "\n"
