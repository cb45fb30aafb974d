"""Exception types raised across the package.

Every failure mode that callers may want to catch separately gets its own
class. All of them inherit from SbpsatError so that ``except SbpsatError``
catches any library-specific failure while leaving programming errors
(TypeError, ValueError from bad arguments) alone.
"""

from __future__ import annotations


class SbpsatError(Exception):
    """Base class for all library-specific errors."""


class SingularMatrixError(SbpsatError):
    """A dense solve hit a pivot too small relative to the matrix norm."""


class NotSymmetricError(SbpsatError):
    """A routine requiring a symmetric matrix received a non-symmetric one."""


class NoConvergenceError(SbpsatError):
    """An iterative eigenvalue computation failed to converge."""


class GridTooSmallError(SbpsatError):
    """The requested grid cannot hold two non-overlapping boundary closures."""


class UnknownVariantError(SbpsatError):
    """An unsupported operator variant or variant/order combination."""


class SingularPerturbedMatrixError(SbpsatError):
    """The perturbed stiffness matrix used for corner constants is singular."""


class SingularPError(SbpsatError):
    """A boundary rotation block P is singular, so the boundary conditions
    do not control the characteristics entering the domain."""


class InvalidZeroBlockError(SbpsatError):
    """Boundary condition rows act on characteristics that must stay free."""


class NotWellPosedError(SbpsatError):
    """The continuous problem fails the boundary dissipation conditions."""


class DualityViolatedError(SbpsatError):
    """Penalties fail the algebraic constraints required for dual consistency."""


class SingularPenaltyDenominatorError(SbpsatError):
    """The matrix inverted inside a penalty formula is singular."""


class InvalidOmegaError(SbpsatError):
    """The scalar factorization parameter is outside its valid range."""


class ShapeMismatchError(SbpsatError):
    """Matrix or vector dimensions are inconsistent with the problem size."""


class BlowUpError(SbpsatError):
    """The time integration produced an unbounded solution."""


class ConfigError(SbpsatError):
    """A run configuration file is malformed or references unknown names."""
