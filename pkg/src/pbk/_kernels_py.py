"""Pure-NumPy implementation of the hot kernels.

The compiled extension (``pbk._kernels``) exposes the same three entry points;
whichever is importable gets selected in :mod:`pbk.backend`.  Potentials are
encoded as exponential sums ``phi(t) = sum_i c_i exp(p_i t)`` by the parallel
arrays ``powers`` and ``coeffs``.
"""

from __future__ import annotations

import numpy as np

from .quadrature import QuadratureError, integrate_log

COMPILED = False


def phi_eval(powers, coeffs, t, order=0):
    """Derivative of order ``order`` of the exponential-sum potential."""
    t = np.asarray(t, dtype=float)
    p = np.asarray(powers, dtype=float)
    c = np.asarray(coeffs, dtype=float) * p ** order
    return np.exp(t[..., None] * p) @ c


def plateau_chi(x, plateau_end, support_end):
    """Smooth cutoff: 1 on [0, plateau_end], 0 beyond support_end.

    Built from the symmetric exp(-1/s) smoothstep, so the transition is C-inf
    and the midpoint value is exactly 1/2.
    """
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    out[x >= support_end] = 0.0
    mid = (x > plateau_end) & (x < support_end)
    if np.any(mid):
        s = (support_end - x[mid]) / (support_end - plateau_end)
        with np.errstate(over="ignore", under="ignore"):
            f = np.exp(-1.0 / s)
            g = np.exp(-1.0 / (1.0 - s))
        out[mid] = f / (f + g)
    return out


def t_from_x(powers, coeffs, x, t_lo, t_hi):
    """Solve ``phi_t(t) = x`` elementwise on the bracket ``[t_lo, t_hi]``.

    Safeguarded Newton: the bracket is maintained by bisection, so strict
    convexity of phi guarantees convergence.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    x_lo = float(phi_eval(powers, coeffs, t_lo, 1))
    x_hi = float(phi_eval(powers, coeffs, t_hi, 1))
    if np.any(x < x_lo) or np.any(x > x_hi):
        bad = x[(x < x_lo) | (x > x_hi)][0]
        raise ValueError(
            f"moment value x={bad!r} outside the invertible range "
            f"[{x_lo:.3e}, {x_hi:.3e}]")
    lo = np.full(x.shape, t_lo)
    hi = np.full(x.shape, t_hi)
    t = np.clip(0.5 * np.log(x), t_lo, t_hi)
    for _ in range(120):
        ft = phi_eval(powers, coeffs, t, 1) - x
        lo = np.where(ft < 0, t, lo)
        hi = np.where(ft > 0, t, hi)
        step = ft / phi_eval(powers, coeffs, t, 2)
        tn = t - step
        outside = (tn <= lo) | (tn >= hi) | ~np.isfinite(tn)
        tn = np.where(outside, 0.5 * (lo + hi), tn)
        done = np.abs(tn - t) <= 1e-15 * (1.0 + np.abs(tn))
        t = tn
        if np.all(done):
            break
    resid = np.abs(phi_eval(powers, coeffs, t, 1) - x)
    bad = resid > 1e-11 * np.maximum(x, 1e-30)
    if np.any(bad):
        raise ValueError(
            f"Newton inversion of the moment map failed at x={x[bad][0]!r}")
    return float(t[0]) if scalar else t


def log_exp_moment_integral(powers, coeffs, two_n, two_k, t_lo, t_hi,
                            use_chi=False, plateau_end=0.0, support_end=0.0,
                            rel_tol=1e-10):
    """log of ``integral exp(two_n*t - two_k*phi(t)) * phi_tt(t) [* chi(phi_t)] dt``.

    This single family covers both the weighted monomial norms (no cutoff;
    ``two_n = 2n``) and the local-kernel normalization integrals after the
    change of variables ``x = phi_t(t)`` (with cutoff; ``two_n = 2 k nu``).
    """
    def log_f(t):
        t = np.asarray(t, dtype=float)
        g = two_n * t - two_k * phi_eval(powers, coeffs, t) \
            + np.log(phi_eval(powers, coeffs, t, 2))
        if use_chi:
            with np.errstate(divide="ignore"):
                g = g + np.log(plateau_chi(phi_eval(powers, coeffs, t, 1),
                                           plateau_end, support_end))
        return g

    res = integrate_log(log_f, t_lo, t_hi, rel_tol=rel_tol)
    return float(res.value)


def self_test():
    """Cheap smoke check used by the backend selector."""
    t = t_from_x([2.0], [0.5], np.array([0.25]), -18.0, 0.0)
    assert abs(t[0] - 0.5 * np.log(0.25)) < 1e-12
    return True
