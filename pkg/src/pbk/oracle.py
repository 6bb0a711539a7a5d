"""Brute-force ground truth: exact weighted monomial norms and densities.

Circle symmetry makes the monomials an orthogonal basis (the theta-integral
of ``exp(i (n - m) theta)`` vanishes for ``n != m``), so no Gram inversion is
needed: the exact partial density is a normalized sum of pointwise monomial
norms.  The 2*pi of the theta-integral is absorbed into the measure so that
norms read ``|z^n|^2 = integral exp(2 n t - 2 k phi) phi_tt dt`` over
``t <= 0`` (equivalently ``dx`` in moment variables); every route shares this
convention, so route comparisons are convention-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import DomainError
from .potential import RadialPotential
from .profiles import DensityProfile

__all__ = [
    "NormTable",
    "monomial_norm_sq",
    "log_monomial_norm_sq",
    "exact_pdf",
    "exact_log_pdf",
    "profile_oracle",
    "CompareReport",
    "compare",
]

NORM_REL_TOL = 1e-10


def log_monomial_norm_sq(p: RadialPotential, n: int, k: int,
                         rel_tol: float = NORM_REL_TOL) -> float:
    """log of the squared weighted norm of z^n on the disc."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    return kernels.log_exp_moment_integral(
        p.powers, p.coeffs, 2.0 * n, 2.0 * k, p.t_floor, 0.0,
        False, 0.0, 0.0, rel_tol)


def monomial_norm_sq(p: RadialPotential, n: int, k: int,
                     rel_tol: float = NORM_REL_TOL) -> float:
    """Squared weighted norm of z^n; use the log variant once 2k|u| nears 700."""
    return math.exp(log_monomial_norm_sq(p, n, k, rel_tol))


class NormTable:
    """Log-norms of z^0 ... z^n_max at fixed k; computed once, then read-only."""

    def __init__(self, p: RadialPotential, k: int, n_max: int,
                 rel_tol: float = NORM_REL_TOL):
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        self.potential = p
        self.k = int(k)
        self.ns = np.arange(0, n_max + 1)
        self.log_norms = np.array(
            [log_monomial_norm_sq(p, int(n), k, rel_tol) for n in self.ns])
        self._a = p.boundary_moment

    def log_weights(self, x: float) -> np.ndarray:
        """log of ``|z^n|^2 exp(-2 k phi) / ||z^n||^2`` for every tabulated n."""
        if not (0.0 < x < self._a):
            raise DomainError(f"x={x!r} outside (0, a={self._a!r})")
        p = self.potential
        t = float(kernels.t_from_x(p.powers, p.coeffs, x, p.t_floor, 0.0))
        return 2.0 * self.ns * t - 2.0 * self.k * float(p.phi(t)) - self.log_norms

    def log_pdf(self, eps: float, x: float) -> float:
        m = math.ceil(eps * self.k - 1e-12)
        if m > self.ns[-1]:
            raise ValueError(f"threshold ceil(eps k)={m} exceeds n_max={self.ns[-1]}")
        lw = self.log_weights(x)[m:]
        top = float(lw.max())
        return top + math.log(float(np.exp(lw - top).sum()))

    def pdf(self, eps: float, x: float) -> float:
        lp = self.log_pdf(eps, x)
        return math.exp(lp) if lp > -700.0 else 0.0

    def profile(self, eps: float, xs) -> DensityProfile:
        xs = np.asarray(xs, dtype=float)
        vals = np.array([self.pdf(eps, float(x)) for x in xs])
        return DensityProfile(self.k, "oracle", xs, vals,
                              meta={"eps": eps, "n_max": int(self.ns[-1])})


_TABLES: dict = {}


def _table(p: RadialPotential, k: int, n_max: int) -> NormTable:
    key = (id(p), k, n_max)
    hit = _TABLES.get(key)
    if hit is not None and hit.potential is p:
        return hit
    table = NormTable(p, k, n_max)
    _TABLES[key] = table
    return table


def clear_cache():
    _TABLES.clear()


def exact_pdf(p: RadialPotential, k: int, eps: float, n_max: int,
              x: float) -> float:
    """Exact truncated partial density ``sum_{n >= eps k} |z^n|^2 e^{-2k phi} / ||z^n||^2``."""
    return _table(p, k, n_max).pdf(eps, x)


def exact_log_pdf(p: RadialPotential, k: int, eps: float, n_max: int,
                  x: float) -> float:
    return _table(p, k, n_max).log_pdf(eps, x)


def profile_oracle(p: RadialPotential, k: int, eps: float, n_max: int,
                   xs) -> DensityProfile:
    return _table(p, k, n_max).profile(eps, xs)


@dataclass(frozen=True)
class CompareReport:
    sup_abs: float
    x_at_sup_abs: float
    sup_rel: float
    x_at_sup_rel: float
    n_points: int

    def __str__(self):
        return (f"sup|a-b| = {self.sup_abs:.6e} at x = {self.x_at_sup_abs:.6g}; "
                f"sup rel = {self.sup_rel:.6e} at x = {self.x_at_sup_rel:.6g} "
                f"({self.n_points} points)")


def compare(a: DensityProfile, b: DensityProfile) -> CompareReport:
    """Sup-norm comparison of two profiles on an identical x-grid."""
    if a.xs.shape != b.xs.shape or np.any(np.abs(a.xs - b.xs) > 1e-12):
        raise ValueError("profiles must share an identical x-grid")
    diff = np.abs(a.values - b.values)
    scale = np.maximum(np.maximum(np.abs(a.values), np.abs(b.values)), 1e-300)
    rel = diff / scale
    i_abs = int(np.argmax(diff))
    i_rel = int(np.argmax(rel))
    return CompareReport(float(diff[i_abs]), float(a.xs[i_abs]),
                         float(rel[i_rel]), float(a.xs[i_rel]), len(a.xs))
