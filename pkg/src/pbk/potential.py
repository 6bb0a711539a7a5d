"""Radial potentials on the unit disc and the moment map.

A potential is a strictly convex function ``phi`` of the log-radius
``t = log|z| <= 0``; the hermitian weight used throughout the package is
``exp(-2 k phi)``.  All potentials here are exponential sums
``phi(t) = sum_i c_i exp(p_i t)``, which supplies analytic derivatives (the
Legendre/Laplace machinery needs accurate second derivatives) and normalizes
the moment map by ``phi_t -> 0`` as ``t -> -inf``.
"""

from __future__ import annotations

import numpy as np

from . import _kernels_py
from .errors import ConvexityError

__all__ = ["RadialPotential", "bargmann_fock", "perturbed", "moment_map"]

T_FLOOR_DEFAULT = -18.0  # below this every weight exp(p t), p >= 1 underflows


class RadialPotential:
    """Strictly convex radial potential with analytic derivatives.

    Attributes
    ----------
    powers, coeffs : ndarray
        Exponential-sum data: ``phi(t) = sum_i coeffs[i] * exp(powers[i] t)``.
    t_floor : float
        Numerical lower cutoff for evaluation in log-radius.
    label : str
        Name used by the CLI (``model`` or ``perturbed:a1,a2,...``).
    """

    def __init__(self, powers, coeffs, t_floor=T_FLOOR_DEFAULT, label=""):
        self.powers = np.asarray(powers, dtype=float)
        self.coeffs = np.asarray(coeffs, dtype=float)
        if self.powers.shape != self.coeffs.shape or self.powers.ndim != 1:
            raise ValueError("powers and coeffs must be parallel 1-d arrays")
        self.t_floor = float(t_floor)
        self.label = label or "expsum"
        self._check_convexity()

    def _check_convexity(self):
        t = np.linspace(self.t_floor, 0.0, 4096)
        h = self.phi_tt(t)
        if np.any(h <= 0):
            t_bad = float(t[np.flatnonzero(h <= 0)[0]])
            raise ConvexityError(
                f"phi_tt changes sign at t={t_bad:.6f}; "
                "potential is not strictly convex", t_bad=t_bad)

    def phi(self, t):
        return _kernels_py.phi_eval(self.powers, self.coeffs, t, 0)

    def phi_t(self, t):
        return _kernels_py.phi_eval(self.powers, self.coeffs, t, 1)

    def phi_tt(self, t):
        return _kernels_py.phi_eval(self.powers, self.coeffs, t, 2)

    @property
    def boundary_moment(self):
        """Moment value ``a = phi_t(0)`` of the boundary circle |z| = 1."""
        return float(self.phi_t(0.0))

    def __repr__(self):
        return f"RadialPotential({self.label!r})"


def bargmann_fock() -> RadialPotential:
    """The model potential ``phi(t) = exp(2t)/2`` (i.e. ``|z|^2 / 2``).

    With the weight convention ``exp(-2 k phi)`` this realizes the Gaussian
    weight ``exp(-k |z|^2)`` and has the closed-form symplectic potential
    ``u(x) = (x log x - x)/2``.
    """
    return RadialPotential([2.0], [0.5], label="model")


def perturbed(amplitudes) -> RadialPotential:
    """Model potential plus higher exponentials ``a_j exp((2+j) t)``, j = 1...

    Construction fails with :class:`ConvexityError` (reporting the offending
    t) if the resulting ``phi_tt`` is not positive on ``(t_floor, 0]``.
    """
    amplitudes = [float(a) for a in amplitudes]
    powers = [2.0] + [2.0 + j for j in range(1, len(amplitudes) + 1)]
    coeffs = [0.5] + amplitudes
    label = "model" if not amplitudes else (
        "perturbed:" + ",".join(repr(a) for a in amplitudes))
    return RadialPotential(powers, coeffs, label=label)


def moment_map(p: RadialPotential, t):
    """Moment map ``x = phi_t(t)`` of the circle action (x = 0 at the origin)."""
    return p.phi_t(t)
