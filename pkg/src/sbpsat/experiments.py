"""Manufactured-solution presets, error norms, functionals, and studies.

Each preset bundles a closed-form exact solution, the analytically derived
forcing ``F = u_t + A u_x - E u_xx``, boundary data sampled from the exact
solution, and one or more functional weights. ``run_case`` executes the
full pipeline (operators, penalties, assembly, certificate, solve, error
report) for one grid; ``convergence_study`` and ``omega_sweep`` batch it.

Discrete functionals are evaluated as ``J = G^T Hbar U`` with the weights
sampled on the grid. Reference functionals are computed by composite
Gauss-Legendre quadrature with panel doubling until two consecutive
estimates agree to 1e-13 relative, never by the discrete quadrature
(which would hide the superconvergence being measured).

Time-dependent runs start from the exact solution sampled at t = 0.
"""

from __future__ import annotations

import math
import time as _time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .assembly import (
    DualityCertificate,
    ProblemSpec,
    SemiDiscreteSystem,
    _parabolic_boundary_environment,
    assemble_parabolic,
    certify,
)
from .errors import ConfigError, NoConvergenceError
from .operators import SbpOperatorSet, build_second_derivative
from .penalties import (
    BoundaryConditionSpec,
    ParabolicPenalties,
    inconsistent_comparison_penalties,
    parabolic_theorem2,
    scalar_penalties,
)
from .solver import TimeIntegratorConfig, integrate, solve_steady

__all__ = [
    "FunctionalSpec",
    "ErrorReport",
    "ConvergenceRow",
    "OmegaSweepRow",
    "PresetProblem",
    "PRESETS",
    "OMEGA_MODES",
    "PENALTY_FLAVORS",
    "make_preset",
    "resolve_omega",
    "functional",
    "reference_functional",
    "run_case",
    "certify_case",
    "convergence_study",
    "omega_sweep",
]

PRESETS = (
    "heat_dirichlet_steady",
    "heat_dirichlet",
    "heat_neumann",
    "advdiff_dirichlet_steady",
    "advdiff_boundary_layer",
    "advdiff_farfield",
    "ns_wall_system",
)

OMEGA_MODES = ("eigen", "q_eps", "abs_a", "abs_a_plus_q_eps", "inf")
PENALTY_FLAVORS = ("theorem2", "method1", "method2", "ns_alternative")

_REFERENCE_TOL = 1e-13
_GAUSS_POINTS = 12
_MAX_PANELS = 2**21


@dataclass(frozen=True)
class FunctionalSpec:
    """A functional weight, optionally bound to a grid.

    ``weight`` maps point abscissae with shape (npts,) to component values
    with shape (n, npts). ``weights`` holds the flattened point-major
    samples G_i once ``bind`` has been called.
    """

    label: str
    weight: Callable[[np.ndarray], np.ndarray]
    weights: np.ndarray | None = None

    def bind(self, grid: np.ndarray, n: int) -> "FunctionalSpec":
        vals = np.asarray(self.weight(grid), dtype=float)
        if vals.shape != (n, grid.size):
            raise ValueError(
                f"weight {self.label!r} returned shape {vals.shape}, "
                f"expected ({n}, {grid.size})"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"weight {self.label!r} produced non-finite values")
        return replace(self, weights=vals.T.ravel())


def functional(g: FunctionalSpec, u: np.ndarray, hbar: np.ndarray) -> float:
    """Discrete functional ``J = G^T Hbar U`` for a grid-bound weight."""
    if g.weights is None:
        raise ValueError(f"functional weight {g.label!r} is not bound to a grid")
    if g.weights.shape != u.shape or hbar.shape != u.shape:
        raise ValueError(
            f"shape mismatch: weights {g.weights.shape}, state {u.shape}, "
            f"norm {hbar.shape}"
        )
    return float(g.weights @ (hbar * u))


def reference_functional(
    g: FunctionalSpec,
    exact: Callable[[np.ndarray, float], np.ndarray],
    t: float,
    x_l: float,
    x_r: float,
    rel_tol: float = _REFERENCE_TOL,
) -> float:
    """Reference value of ``J = integral of G^T u`` on [x_l, x_r].

    Composite Gauss-Legendre quadrature; the panel count doubles until two
    consecutive estimates agree to ``rel_tol`` relative.
    """
    nodes, gauss_w = np.polynomial.legendre.leggauss(_GAUSS_POINTS)

    def estimate(panels: int) -> float:
        edges = np.linspace(x_l, x_r, panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        x = (mids[:, None] + half * nodes[None, :]).ravel()
        integrand = np.sum(
            np.asarray(g.weight(x), dtype=float) * np.asarray(exact(x, t), dtype=float),
            axis=0,
        )
        return float(half * np.sum(integrand.reshape(panels, -1) @ gauss_w))

    panels = 8
    prev = estimate(panels)
    while panels <= _MAX_PANELS:
        panels *= 2
        cur = estimate(panels)
        if abs(cur - prev) < rel_tol * (1.0 + abs(cur)):
            return cur
        prev = cur
    raise NoConvergenceError(
        f"reference functional {g.label!r} did not stabilize to "
        f"{rel_tol:g} within {_MAX_PANELS} panels"
    )


@dataclass(frozen=True)
class ErrorReport:
    """Errors, spectrum summary, and certificate for one completed run."""

    sol_error: float
    func_errors: tuple[float, ...]
    rho: float | None
    eta: float | None
    certificate: DualityCertificate
    component_sol_errors: tuple[float, ...] | None
    solution: np.ndarray
    grid: np.ndarray

    def __post_init__(self) -> None:
        if self.sol_error < 0.0 or any(e < 0.0 for e in self.func_errors):
            raise ValueError("error norms must be nonnegative")


@dataclass(frozen=True)
class ConvergenceRow:
    """One grid level of a refinement study with Richardson orders."""

    N: int
    h: float
    sol_error: float
    sol_order: float | None
    func_errors: tuple[float, ...]
    func_orders: tuple[float | None, ...]
    omega_mode: str
    runtime: float
    report: ErrorReport


@dataclass(frozen=True)
class OmegaSweepRow:
    """Errors and spectrum summary for a single factorization parameter."""

    omega: float
    rho: float | None
    eta: float | None
    sol_error: float
    func_errors: tuple[float, ...]
    report: ErrorReport


@dataclass(frozen=True)
class PresetProblem:
    """A named manufactured problem ready for the run pipeline.

    ``scalar_bc`` holds the boundary rows (alpha_L, beta_L, alpha_R,
    beta_R) of ``alpha*u + beta*u_x = g`` when the scalar closed-form
    penalty route applies (n = 1); system presets leave it None and go
    through the eigendecomposition of the doubled symmetric matrix.
    """

    name: str
    problem: ProblemSpec
    functionals: tuple[FunctionalSpec, ...]
    scalar_bc: tuple[float, float, float, float] | None
    default_time: TimeIntegratorConfig | None
    default_omega_mode: str


def resolve_omega(mode: str, a: float, eps: float, q: float) -> float:
    """Map a factorization-parameter mode name to its numeric value."""
    if mode == "eigen":
        return math.sqrt(a * a + 4.0 * eps * eps)
    if mode == "q_eps":
        return q * eps
    if mode == "abs_a":
        return abs(a)
    if mode == "abs_a_plus_q_eps":
        return abs(a) + q * eps
    if mode == "inf":
        return math.inf
    if mode.startswith("value:"):
        try:
            return float(mode.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"cannot parse omega mode {mode!r}") from exc
    raise ConfigError(
        f"unknown omega mode {mode!r}, expected one of {OMEGA_MODES} or 'value:<x>'"
    )


def _scalar_bc_spec(
    alpha_l: float,
    beta_l: float,
    alpha_r: float,
    beta_r: float,
    eps: float,
    g_l: Callable[[float], float],
    g_r: Callable[[float], float],
) -> BoundaryConditionSpec:
    return BoundaryConditionSpec(
        H_L=np.array([[alpha_l]]),
        G_L=np.array([[beta_l]]),
        H_R=np.array([[alpha_r]]),
        G_R=np.array([[beta_r]]),
        K_L=np.array([[beta_l / eps]]),
        K_R=np.array([[beta_r / eps]]),
        g_L=lambda t: np.array([g_l(t)]),
        g_R=lambda t: np.array([g_r(t)]),
    )


def _weight_cos30() -> FunctionalSpec:
    return FunctionalSpec("cos(30x)", lambda x: np.cos(30.0 * x)[None, :])


def _weight_one() -> FunctionalSpec:
    return FunctionalSpec("1", lambda x: np.ones_like(x)[None, :])


def _heat_dirichlet_steady(eps: float = 0.01) -> PresetProblem:
    def exact(x: np.ndarray, t: float) -> np.ndarray:
        return np.cos(30.0 * x)[None, :]

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        return 900.0 * eps * np.cos(30.0 * x)[None, :]

    bc = _scalar_bc_spec(1.0, 0.0, 1.0, 0.0, eps,
                         lambda t: 1.0, lambda t: math.cos(30.0))
    problem = ProblemSpec(kind="parabolic", n=1, A=np.zeros((1, 1)),
                          E=np.array([[eps]]), bc=bc, x_L=0.0, x_R=1.0,
                          forcing=forcing, exact=exact)
    return PresetProblem(
        name="heat_dirichlet_steady", problem=problem,
        functionals=(_weight_cos30(),), scalar_bc=(1.0, 0.0, 1.0, 0.0),
        default_time=None, default_omega_mode="q_eps")


def _heat_dirichlet(eps: float = 0.01) -> PresetProblem:
    def exact(x: np.ndarray, t: float) -> np.ndarray:
        vals = (np.cos(30.0 * x) + np.sin(20.0 * x) * math.cos(10.0 * t)
                + math.sin(35.0 * t))
        return vals[None, :]

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        u_t = (-10.0 * np.sin(20.0 * x) * math.sin(10.0 * t)
               + 35.0 * math.cos(35.0 * t))
        u_xx = -900.0 * np.cos(30.0 * x) - 400.0 * np.sin(20.0 * x) * math.cos(10.0 * t)
        return (u_t - eps * u_xx)[None, :]

    def g_l(t: float) -> float:
        return 1.0 + math.sin(35.0 * t)

    def g_r(t: float) -> float:
        return (math.cos(30.0) + math.sin(20.0) * math.cos(10.0 * t)
                + math.sin(35.0 * t))

    bc = _scalar_bc_spec(1.0, 0.0, 1.0, 0.0, eps, g_l, g_r)
    problem = ProblemSpec(kind="parabolic", n=1, A=np.zeros((1, 1)),
                          E=np.array([[eps]]), bc=bc, x_L=0.0, x_R=1.0,
                          forcing=forcing, exact=exact)
    return PresetProblem(
        name="heat_dirichlet", problem=problem,
        functionals=(_weight_one(),), scalar_bc=(1.0, 0.0, 1.0, 0.0),
        default_time=TimeIntegratorConfig("rk4_classic", 1e-4, 1.0),
        default_omega_mode="q_eps")


def _heat_neumann(eps: float = 0.01) -> PresetProblem:
    def exact(x: np.ndarray, t: float) -> np.ndarray:
        return np.cos(30.0 * x)[None, :]

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        return 900.0 * eps * np.cos(30.0 * x)[None, :]

    bc = _scalar_bc_spec(0.0, 1.0, 0.0, 1.0, eps,
                         lambda t: 0.0, lambda t: -30.0 * math.sin(30.0))
    problem = ProblemSpec(kind="parabolic", n=1, A=np.zeros((1, 1)),
                          E=np.array([[eps]]), bc=bc, x_L=0.0, x_R=1.0,
                          forcing=forcing, exact=exact)
    return PresetProblem(
        name="heat_neumann", problem=problem,
        functionals=(_weight_cos30(),), scalar_bc=(0.0, 1.0, 0.0, 1.0),
        default_time=TimeIntegratorConfig("implicit_euler", 1.0, 100.0),
        default_omega_mode="inf")


def _advdiff_dirichlet_steady(a: float = 1.0, eps: float = 0.1) -> PresetProblem:
    def exact(x: np.ndarray, t: float) -> np.ndarray:
        return np.cos(30.0 * x)[None, :]

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        return (-30.0 * a * np.sin(30.0 * x)
                + 900.0 * eps * np.cos(30.0 * x))[None, :]

    bc = _scalar_bc_spec(1.0, 0.0, 1.0, 0.0, eps,
                         lambda t: 1.0, lambda t: math.cos(30.0))
    problem = ProblemSpec(kind="parabolic", n=1, A=np.array([[a]]),
                          E=np.array([[eps]]), bc=bc, x_L=0.0, x_R=1.0,
                          forcing=forcing, exact=exact)
    return PresetProblem(
        name="advdiff_dirichlet_steady", problem=problem,
        functionals=(_weight_cos30(),), scalar_bc=(1.0, 0.0, 1.0, 0.0),
        default_time=None, default_omega_mode="abs_a_plus_q_eps")


def _boundary_layer_profile(a: float, eps: float, x: np.ndarray) -> np.ndarray:
    """Stable evaluation of (exp(a x / eps) - 1) / (exp(a / eps) - 1)."""
    if a > 0.0:
        # Rewritten so all exponentials have nonpositive arguments.
        return (np.exp(a * (x - 1.0) / eps)
                * (1.0 - np.exp(-a * x / eps))
                / (1.0 - math.exp(-a / eps)))
    return (np.exp(a * x / eps) - 1.0) / (math.exp(a / eps) - 1.0)


def _advdiff_boundary_layer(
    a: float = 1.0,
    eps: float = 0.005,
    g_left: float = 0.0,
    g_right: float = 1.0,
) -> PresetProblem:
    if a == 0.0:
        raise ConfigError("the boundary-layer preset requires a nonzero wave speed")

    def exact(x: np.ndarray, t: float) -> np.ndarray:
        return (g_left + (g_right - g_left)
                * _boundary_layer_profile(a, eps, x))[None, :]

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        return np.zeros((1, x.size))

    bc = _scalar_bc_spec(1.0, 0.0, 1.0, 0.0, eps,
                         lambda t: g_left, lambda t: g_right)
    problem = ProblemSpec(kind="parabolic", n=1, A=np.array([[a]]),
                          E=np.array([[eps]]), bc=bc, x_L=0.0, x_R=1.0,
                          forcing=forcing, exact=exact)
    return PresetProblem(
        name="advdiff_boundary_layer", problem=problem,
        functionals=(_weight_one(),), scalar_bc=(1.0, 0.0, 1.0, 0.0),
        default_time=None, default_omega_mode="abs_a")


def _advdiff_farfield(a: float = 1.0, eps: float = 1e-4) -> PresetProblem:
    alpha_l = 0.5 * (abs(a) + a)
    beta_l = -eps
    alpha_r = 0.5 * (abs(a) - a)
    beta_r = eps

    def exact(x: np.ndarray, t: float) -> np.ndarray:
        return np.cos(30.0 * x)[None, :]

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        return (-30.0 * a * np.sin(30.0 * x)
                + 900.0 * eps * np.cos(30.0 * x))[None, :]

    g_l = alpha_l * 1.0 + beta_l * 0.0
    g_r = alpha_r * math.cos(30.0) + beta_r * (-30.0 * math.sin(30.0))
    bc = _scalar_bc_spec(alpha_l, beta_l, alpha_r, beta_r, eps,
                         lambda t: g_l, lambda t: g_r)
    problem = ProblemSpec(kind="parabolic", n=1, A=np.array([[a]]),
                          E=np.array([[eps]]), bc=bc, x_L=0.0, x_R=1.0,
                          forcing=forcing, exact=exact)
    return PresetProblem(
        name="advdiff_farfield", problem=problem,
        functionals=(_weight_cos30(),),
        scalar_bc=(alpha_l, beta_l, alpha_r, beta_r),
        default_time=None, default_omega_mode="inf")


def _ns_wall_system(
    ubar: float = -0.5,
    a: float = 0.8,
    b: float = 0.6,
    eps: float = 0.01,
    phi: float = 1.0,
    psi: float = 2.0,
) -> PresetProblem:
    a_mat = np.array([[ubar, a, 0.0], [a, ubar, b], [0.0, b, ubar]])
    e_mat = eps * np.diag([0.0, phi, psi])
    h_left = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    k_left = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0 / (eps * psi)]])
    g_left_mat = k_left @ e_mat
    h_right = np.eye(3)
    k_right = np.zeros((3, 3))
    g_right_mat = np.zeros((3, 3))

    def exact(x: np.ndarray, t: float) -> np.ndarray:
        return np.vstack([np.cos(7.0 * x), np.sin(13.0 * x), np.cos(30.0 * x)])

    def forcing(x: np.ndarray, t: float) -> np.ndarray:
        u_x = np.vstack([-7.0 * np.sin(7.0 * x),
                         13.0 * np.cos(13.0 * x),
                         -30.0 * np.sin(30.0 * x)])
        u_xx = np.vstack([-49.0 * np.cos(7.0 * x),
                          -169.0 * np.sin(13.0 * x),
                          -900.0 * np.cos(30.0 * x)])
        return a_mat @ u_x - e_mat @ u_xx

    # The wall data (velocity and temperature gradient) is exactly zero
    # for the manufactured solution; the free stream fixes all variables.
    bc = BoundaryConditionSpec(
        H_L=h_left, G_L=g_left_mat, H_R=h_right, G_R=g_right_mat,
        K_L=k_left, K_R=k_right,
        g_L=lambda t: np.zeros(2),
        g_R=lambda t: np.array([math.cos(7.0), math.sin(13.0), math.cos(30.0)]))
    problem = ProblemSpec(kind="parabolic", n=3, A=a_mat, E=e_mat, bc=bc,
                          x_L=0.0, x_R=1.0, forcing=forcing, exact=exact)

    def unit_weight(component: int) -> Callable[[np.ndarray], np.ndarray]:
        def weight(x: np.ndarray) -> np.ndarray:
            vals = np.zeros((3, x.size))
            vals[component] = 1.0
            return vals
        return weight

    functionals = (FunctionalSpec("rho", unit_weight(0)),
                   FunctionalSpec("u", unit_weight(1)),
                   FunctionalSpec("T", unit_weight(2)))
    return PresetProblem(
        name="ns_wall_system", problem=problem, functionals=functionals,
        scalar_bc=None, default_time=None, default_omega_mode="eigen")


_PRESET_BUILDERS: dict[str, Callable[..., PresetProblem]] = {
    "heat_dirichlet_steady": _heat_dirichlet_steady,
    "heat_dirichlet": _heat_dirichlet,
    "heat_neumann": _heat_neumann,
    "advdiff_dirichlet_steady": _advdiff_dirichlet_steady,
    "advdiff_boundary_layer": _advdiff_boundary_layer,
    "advdiff_farfield": _advdiff_farfield,
    "ns_wall_system": _ns_wall_system,
}


def make_preset(name: str, **overrides: float) -> PresetProblem:
    """Build a catalogue preset, optionally overriding its parameters."""
    try:
        builder = _PRESET_BUILDERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}, expected one of {PRESETS}"
        ) from None
    try:
        return builder(**overrides)
    except TypeError as exc:
        raise ConfigError(f"bad overrides for preset {name!r}: {exc}") from exc


def _build_penalties(
    preset: PresetProblem,
    opset: SbpOperatorSet,
    omega_mode: str,
    penalty_flavor: str,
) -> ParabolicPenalties:
    problem = preset.problem
    if penalty_flavor not in PENALTY_FLAVORS:
        raise ConfigError(
            f"unknown penalty flavor {penalty_flavor!r}, "
            f"expected one of {PENALTY_FLAVORS}"
        )
    if preset.scalar_bc is not None:
        a = float(problem.A[0, 0])
        eps = float(problem.E[0, 0])
        if penalty_flavor == "theorem2":
            alpha_l, beta_l, alpha_r, beta_r = preset.scalar_bc
            omega = resolve_omega(omega_mode, a, eps, opset.q)
            return scalar_penalties(a, eps, alpha_l, beta_l, alpha_r, beta_r,
                                    omega=omega, q=opset.q)
        if penalty_flavor == "method1":
            return inconsistent_comparison_penalties("method1", a=a, eps=eps,
                                                     q=opset.q)
        if penalty_flavor == "method2":
            return inconsistent_comparison_penalties("method2", a=a, eps=eps)
        raise ConfigError(
            "penalty flavor 'ns_alternative' applies only to the wall system"
        )
    if omega_mode != "eigen":
        raise ConfigError(
            "system presets support only the eigendecomposition route "
            "(omega_mode 'eigen')"
        )
    if penalty_flavor == "theorem2":
        fact, rot, *_ = _parabolic_boundary_environment(problem)
        return parabolic_theorem2(fact, rot, problem.bc.K_L, problem.bc.K_R,
                                  opset.q)
    if penalty_flavor == "ns_alternative":
        # E = eps * diag(0, phi, psi) only enters through the products
        # eps*phi and eps*psi, so the split is immaterial here.
        return inconsistent_comparison_penalties(
            "ns_alternative",
            ubar=float(problem.A[0, 0]), a=float(problem.A[0, 1]),
            b=float(problem.A[1, 2]), eps=1.0,
            phi=float(problem.E[1, 1]), psi=float(problem.E[2, 2]))
    raise ConfigError(
        f"penalty flavor {penalty_flavor!r} applies only to scalar presets"
    )


def _component_errors(
    system: SemiDiscreteSystem, err_flat: np.ndarray
) -> tuple[float, ...] | None:
    n = system.n
    if n == 1:
        return None
    err = system.unflatten(err_flat)
    h_weights = system.Hbar[::n]
    return tuple(float(np.sqrt(np.sum(h_weights * err[c] ** 2)))
                 for c in range(n))


def run_case(
    preset: PresetProblem | str,
    interior_order: int,
    variant: str,
    omega_mode: str | None,
    N: int,
    time: TimeIntegratorConfig | str | None = None,
    penalty_flavor: str = "theorem2",
) -> ErrorReport:
    """Execute one discretize-certify-solve-report cycle.

    ``time`` may be None (use the preset default; steady when the preset
    has none), the string "steady", or an explicit integrator config.
    """
    if isinstance(preset, str):
        preset = make_preset(preset)
    problem = preset.problem
    if problem.exact is None:
        raise ConfigError(f"preset {preset.name!r} lacks an exact solution")
    if omega_mode is None:
        omega_mode = preset.default_omega_mode
    h = problem.length / N
    opset = build_second_derivative(interior_order, variant, N, h)
    pens = _build_penalties(preset, opset, omega_mode, penalty_flavor)
    system = assemble_parabolic(problem, opset, pens)
    cert = certify(problem, opset, pens)

    if time is None:
        time = preset.default_time
    if time == "steady":
        time = None
    if time is None:
        u = solve_steady(system)
        t_eval = 0.0
    else:
        if not isinstance(time, TimeIntegratorConfig):
            raise ConfigError(
                f"time must be a TimeIntegratorConfig, 'steady', or None, "
                f"got {time!r}"
            )
        u0 = system.flatten(problem.exact(system.grid, 0.0))
        u = integrate(system, time, u0).final
        t_eval = time.t_end

    err_flat = u - system.flatten(problem.exact(system.grid, t_eval))
    sol_error = float(np.sqrt(err_flat @ (system.Hbar * err_flat)))
    func_errors = []
    for g in preset.functionals:
        bound = g.bind(system.grid, problem.n)
        j_h = functional(bound, u, system.Hbar)
        j_ref = reference_functional(g, problem.exact, t_eval,
                                     problem.x_L, problem.x_R)
        func_errors.append(abs(j_h - j_ref))
    return ErrorReport(
        sol_error=sol_error,
        func_errors=tuple(func_errors),
        rho=cert.rho,
        eta=cert.eta,
        certificate=cert,
        component_sol_errors=_component_errors(system, err_flat),
        solution=u,
        grid=system.grid,
    )


def certify_case(
    preset: PresetProblem | str,
    interior_order: int,
    variant: str,
    omega_mode: str | None,
    N: int,
    penalty_flavor: str = "theorem2",
) -> DualityCertificate:
    """Build the certificate for a configuration without solving it."""
    if isinstance(preset, str):
        preset = make_preset(preset)
    if omega_mode is None:
        omega_mode = preset.default_omega_mode
    opset = build_second_derivative(interior_order, variant, N,
                                    preset.problem.length / N)
    pens = _build_penalties(preset, opset, omega_mode, penalty_flavor)
    return certify(preset.problem, opset, pens)


def _order_between(err_coarse: float, err_fine: float,
                   n_coarse: int, n_fine: int) -> float | None:
    if err_coarse <= 0.0 or err_fine <= 0.0:
        return None
    return float(math.log(err_coarse / err_fine) / math.log(n_fine / n_coarse))


def _map_runs(worker: Callable, items: list, threads: int) -> list:
    """Run independent cases, preserving input order for determinism."""
    if threads <= 1:
        return [worker(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, items))


def convergence_study(
    preset: PresetProblem | str,
    interior_order: int,
    variant: str,
    omega_mode: str | None,
    n_list: list[int],
    time: TimeIntegratorConfig | str | None = None,
    penalty_flavor: str = "theorem2",
    threads: int = 1,
) -> list[ConvergenceRow]:
    """Run a refinement sequence and attach Richardson orders.

    The order on each row compares it with the previous (coarser) row;
    the first row carries None. Grids are independent, so ``threads > 1``
    runs them concurrently; the output order and values do not change.
    """
    if isinstance(preset, str):
        preset = make_preset(preset)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigError(f"grid list must be strictly ascending, got {n_list}")

    def worker(n_pts: int) -> tuple[ErrorReport, float]:
        started = _time.perf_counter()
        report = run_case(preset, interior_order, variant, omega_mode, n_pts,
                          time=time, penalty_flavor=penalty_flavor)
        return report, _time.perf_counter() - started

    results = _map_runs(worker, list(n_list), threads)
    rows: list[ConvergenceRow] = []
    for i, (n_pts, (report, runtime)) in enumerate(zip(n_list, results)):
        if i == 0:
            sol_order = None
            func_orders: tuple[float | None, ...] = tuple(
                None for _ in report.func_errors)
        else:
            prev = rows[-1]
            sol_order = _order_between(prev.sol_error, report.sol_error,
                                       prev.N, n_pts)
            func_orders = tuple(
                _order_between(pe, ce, prev.N, n_pts)
                for pe, ce in zip(prev.func_errors, report.func_errors))
        rows.append(ConvergenceRow(
            N=n_pts, h=preset.problem.length / n_pts,
            sol_error=report.sol_error, sol_order=sol_order,
            func_errors=report.func_errors, func_orders=func_orders,
            omega_mode=omega_mode or preset.default_omega_mode,
            runtime=runtime, report=report))
    return rows


def omega_sweep(
    preset: PresetProblem | str,
    interior_order: int,
    variant: str,
    omegas: list[float],
    N: int,
    time: TimeIntegratorConfig | str | None = None,
    penalty_flavor: str = "theorem2",
    threads: int = 1,
) -> list[OmegaSweepRow]:
    """Run the same case across a list of factorization parameters."""

    def worker(omega: float) -> ErrorReport:
        return run_case(preset, interior_order, variant,
                        f"value:{omega:.17g}", N,
                        time=time, penalty_flavor=penalty_flavor)

    reports = _map_runs(worker, list(omegas), threads)
    return [
        OmegaSweepRow(
            omega=float(omega), rho=report.rho, eta=report.eta,
            sol_error=report.sol_error, func_errors=report.func_errors,
            report=report)
        for omega, report in zip(omegas, reports)
    ]
