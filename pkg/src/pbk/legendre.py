"""Legendre duality: the symplectic potential u and the exponent U.

The transform is characterized by ``u(x) + phi(t) = x t`` with ``x = phi_t``
and ``t = u_x``; every weighted section norm in the package reduces to the
nonnegative exponent ``U(nu, x) = u(nu) - u(x) + (x - nu) u_x(x)`` through
``|s_{n,k}|_{k phi} = exp(-k U(n/k, x))``.
"""

from __future__ import annotations

import numpy as np

from .backend import kernels
from .errors import DomainError
from .potential import RadialPotential

__all__ = ["DualPotential", "transform", "exponent_U", "section_norm"]

# Formula-level evaluations (e.g. U at nu or x beyond the boundary moment a)
# stay meaningful for entire exp-sum potentials, so the inversion bracket is
# extended a little past t = 0; disc-geometric operations enforce x < a
# themselves.
T_CEIL_DEFAULT = 1.5


class DualPotential:
    """Legendre transform of a :class:`RadialPotential`; immutable.

    Evaluation is defined on ``(x_min, x_max)`` with
    ``x_min = phi_t(t_floor)`` and ``x_max = phi_t(t_ceil)``; the geometric
    moment interval of the disc is ``(0, a)`` with ``a = phi_t(0)``.
    """

    def __init__(self, p: RadialPotential, t_ceil: float = T_CEIL_DEFAULT):
        self.potential = p
        self.t_ceil = float(t_ceil)
        self.a = p.boundary_moment
        self.x_min = float(p.phi_t(p.t_floor))
        self.x_max = float(p.phi_t(self.t_ceil))

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= self.x_min) or np.any(x >= self.x_max):
            bad = float(np.atleast_1d(x)[(np.atleast_1d(x) <= self.x_min)
                                         | (np.atleast_1d(x) >= self.x_max)][0])
            raise DomainError(
                f"x={bad!r} outside the dual domain "
                f"({self.x_min:.3e}, {self.x_max:.3e})")
        return x

    def t_of_x(self, x):
        """Inverse moment map: the t solving ``phi_t(t) = x``."""
        x = self._check(x)
        try:
            return kernels.t_from_x(self.potential.powers,
                                    self.potential.coeffs,
                                    x, self.potential.t_floor, self.t_ceil)
        except ValueError as exc:
            raise DomainError(str(exc)) from exc

    def u(self, x):
        x = np.asarray(x, dtype=float)
        t = self.t_of_x(x)
        return x * t - self.potential.phi(t)

    def u_x(self, x):
        return self.t_of_x(x)

    def u_xx(self, x):
        # analytic inverse-Hessian identity, not numeric differentiation
        return 1.0 / self.potential.phi_tt(self.t_of_x(x))

    def __repr__(self):
        return f"DualPotential({self.potential.label!r}, a={self.a:.6g})"


def transform(p: RadialPotential) -> DualPotential:
    """Construct the dual potential, verifying the inversion on a spot grid."""
    d = DualPotential(p)
    xs = np.geomspace(max(d.x_min * 10, 1e-12), 0.999 * d.a, 24)
    t = d.t_of_x(xs)  # raises on Newton failure
    resid = np.abs(p.phi_t(t) - xs) / xs
    if np.any(resid > 1e-11):
        raise DomainError("Legendre inversion residual exceeds 1e-11")
    return d


def exponent_U(d: DualPotential, nu: float, x):
    """The section-norm exponent ``U(nu, x) = u(nu) - u(x) + (x - nu) u_x(x)``.

    Nonnegative, vanishing exactly at ``x = nu`` (convexity of u); the unique
    turning point in x sits at ``x = nu`` since ``U_x = (x - nu) u_xx(x)``.
    """
    x = np.asarray(x, dtype=float)
    u_nu = d.u(nu)
    t = d.t_of_x(x)  # = u_x(x)
    u_at_x = x * t - d.potential.phi(t)
    return u_nu - u_at_x + (x - nu) * t


def section_norm(d: DualPotential, n: int, k: int, x):
    """Pointwise weighted norm ``exp(-k U(n/k, x))`` of the normalized monomial.

    Equals 1 exactly at ``x = n/k``; the exponent is formed first and results
    below ``exp(-700)`` are clamped to 0 to avoid underflow traps.
    """
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    expo = k * exponent_U(d, n / k, x)
    expo = np.asarray(expo, dtype=float)
    out = np.where(expo > 700.0, 0.0, np.exp(-np.minimum(expo, 700.0)))
    return float(out) if out.ndim == 0 else out
