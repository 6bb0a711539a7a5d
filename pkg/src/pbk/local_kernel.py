"""The local partial Bergman kernel on the disc.

The kernel is a finite weighted sum of normalized monomials,

    A(z, z') = sum_n G_n conj(s_n(z)) s_n(z'),   1/G_n = integral chi(x) exp(-2k U(nu, x)) dx,

summed over ``ceil(eps k) <= n <= floor(eps' k)`` (or up to ``sigma k`` when
``include_upper`` is set).  On the diagonal, weighting by ``exp(-2 k phi)``
turns this into the density ``rho(x) = sum_n G_n exp(-2 k U(nu, x))``.  After
the change of variables ``x = phi_t(t)`` each normalization integral is the
same exponential-moment integral the Gram oracle uses, evaluated by the
backend kernels in log space (required once k reaches a few hundred).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels_py
from .backend import kernels
from .errors import DomainError
from .legendre import DualPotential
from .profiles import DensityProfile

__all__ = [
    "PbkConfig",
    "LocalKernelTable",
    "cutoff_chi",
    "normalization_constants",
    "pdf_local",
    "pdf_local_log",
    "kernel_offdiag",
    "profile_local",
]

G_REL_TOL = 1e-10


def _int_floor(v: float) -> int:
    return math.floor(v + 1e-12)


def _int_ceil(v: float) -> int:
    return math.ceil(v - 1e-12)


@dataclass(frozen=True)
class PbkConfig:
    """Discretization data (eps, eps', sigma, chi, k) of the local kernel.

    ``support_end`` (the end of chi's support) defaults to the midpoint
    ``(sigma + a)/2`` once the config is bound to a potential; ``eps_prime``
    defaults to ``(eps + sigma)/2``.  ``include_upper`` switches the monomial
    range from ``[eps k, eps' k]`` to ``[eps k, sigma k]``.
    """

    k: int
    epsilon: float
    sigma: float
    eps_prime: float | None = None
    support_end: float | None = None
    include_upper: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        ep = self.eps_prime if self.eps_prime is not None else \
            0.5 * (self.epsilon + self.sigma)
        if not (0.0 <= self.epsilon < ep <= self.sigma):
            raise ValueError(
                f"need 0 <= eps < eps' <= sigma, got eps={self.epsilon}, "
                f"eps'={ep}, sigma={self.sigma}")
        if self.support_end is not None and self.support_end <= self.sigma:
            raise ValueError("support_end must exceed sigma")

    def bound(self, d: DualPotential) -> "PbkConfig":
        """Fill defaults that need the potential's boundary moment a."""
        a = d.a
        if not (self.sigma < a):
            raise ValueError(f"sigma={self.sigma} must be < a={a}")
        ep = self.eps_prime if self.eps_prime is not None else \
            0.5 * (self.epsilon + self.sigma)
        supp = self.support_end if self.support_end is not None else \
            0.5 * (self.sigma + a)
        if not (supp < a):
            raise ValueError(f"support_end={supp} must be < a={a}")
        return replace(self, eps_prime=ep, support_end=supp)

    @property
    def n_lo(self) -> int:
        return _int_ceil(self.epsilon * self.k)

    @property
    def n_hi(self) -> int:
        if self.include_upper:
            return _int_floor(self.sigma * self.k)
        ep = self.eps_prime if self.eps_prime is not None else \
            0.5 * (self.epsilon + self.sigma)
        return _int_floor(ep * self.k)


def cutoff_chi(cfg: PbkConfig, x):
    """The smooth plateau cutoff chi: exactly 1 on [0, sigma], 0 past support."""
    if cfg.support_end is None:
        raise ValueError("config is not bound to a potential "
                         "(support_end unset); call cfg.bound(dual) first")
    out = _kernels_py.plateau_chi(x, cfg.sigma, cfg.support_end)
    return float(out) if np.ndim(x) == 0 else out


def log_norm_constant(d: DualPotential, cfg: PbkConfig, nu: float,
                      rel_tol: float = G_REL_TOL) -> float:
    """log G at a (possibly non-integer) weight fraction nu.

    ``1/G = integral chi(x) exp(-2 k U(nu, x)) dx``; with ``x = phi_t(t)`` this
    becomes ``exp(-2 k u(nu)) * integral chi(phi_t) exp(2 k nu t - 2 k phi)
    phi_tt dt``, one exponential-moment integral per nu.
    """
    cfg = cfg if cfg.support_end is not None else cfg.bound(d)
    p = d.potential
    t_hi = float(d.t_of_x(cfg.support_end))
    log_j = kernels.log_exp_moment_integral(
        p.powers, p.coeffs, 2.0 * cfg.k * nu, 2.0 * cfg.k,
        p.t_floor, t_hi, True, cfg.sigma, cfg.support_end, rel_tol)
    return 2.0 * cfg.k * float(d.u(nu)) - log_j


class LocalKernelTable:
    """Normalization constants for one (potential, config) pair; immutable.

    Evaluation of the diagonal density and the off-diagonal kernel is pure
    over the precomputed table and safe for parallel grid scans.
    """

    def __init__(self, d: DualPotential, cfg: PbkConfig,
                 rel_tol: float = G_REL_TOL):
        self.dual = d
        self.cfg = cfg = cfg.bound(d)
        self.ns = np.arange(cfg.n_lo, cfg.n_hi + 1)
        if len(self.ns) == 0:
            raise ValueError("empty monomial range; increase k or eps'")
        self.nus = self.ns / cfg.k
        self.log_g = np.array([log_norm_constant(d, cfg, nu, rel_tol)
                               for nu in self.nus])
        self.u_nu = np.asarray(d.u(self.nus), dtype=float)

    def _log_terms(self, x: float) -> np.ndarray:
        d, k = self.dual, self.cfg.k
        t = float(d.t_of_x(x))
        u_x = x * t - float(d.potential.phi(t))
        big_u = self.u_nu - u_x + (x - self.nus) * t
        return self.log_g - 2.0 * k * big_u

    def log_pdf(self, x: float) -> float:
        lt = self._log_terms(x)
        m = float(lt.max())
        return m + math.log(float(np.exp(lt - m).sum()))

    def pdf(self, x: float) -> float:
        lp = self.log_pdf(x)
        return math.exp(lp) if lp > -700.0 else 0.0

    def offdiag(self, x: float, x2: float, dtheta: float) -> float:
        d, k = self.dual, self.cfg.k
        expo = np.zeros(len(self.ns))
        for xx in (x, x2):
            t = float(d.t_of_x(xx))
            u_x = xx * t - float(d.potential.phi(t))
            expo -= k * (self.u_nu - u_x + (xx - self.nus) * t)
        lt = self.log_g + expo
        m = float(lt.max())
        z = np.exp(lt - m) * np.exp(1j * self.ns * dtheta)
        return float(np.exp(m) * np.abs(z.sum()))

    def profile(self, xs) -> DensityProfile:
        xs = np.asarray(xs, dtype=float)
        vals = np.array([self.pdf(float(x)) for x in xs])
        return DensityProfile(self.cfg.k, "local_kernel", xs, vals,
                              meta={"config": self.cfg})


# cache of tables; safe because the table holds a strong ref to its dual
_TABLES: dict = {}


def _table(d: DualPotential, cfg: PbkConfig) -> LocalKernelTable:
    key = (id(d), cfg)
    hit = _TABLES.get(key)
    if hit is not None and hit.dual is d:
        return hit
    table = LocalKernelTable(d, cfg)
    _TABLES[key] = table
    return table


def clear_cache():
    _TABLES.clear()


def normalization_constants(d: DualPotential, cfg: PbkConfig) -> dict[int, float]:
    """Map n -> G_n (positive); computed once per (potential, config)."""
    t = _table(d, cfg)
    return {int(n): float(np.exp(lg)) for n, lg in zip(t.ns, t.log_g)}


def _check_eval_x(d: DualPotential, x: float):
    if not (0.0 < x < d.a):
        raise DomainError(f"evaluation point x={x!r} outside (0, a={d.a!r})")


def pdf_local(d: DualPotential, cfg: PbkConfig, x: float) -> float:
    """Diagonal density ``sum_n G_n exp(-2 k U(n/k, x))`` of the local kernel.

    Trusted (and tested) only for x below sigma; values beyond are still
    returned but the truncation at eps' k is no longer negligible there.
    """
    _check_eval_x(d, x)
    return _table(d, cfg).pdf(x)


def pdf_local_log(d: DualPotential, cfg: PbkConfig, x: float) -> float:
    """log of :func:`pdf_local` (usable deep inside the forbidden region)."""
    _check_eval_x(d, x)
    return _table(d, cfg).log_pdf(x)


def kernel_offdiag(d: DualPotential, cfg: PbkConfig, x: float, x2: float,
                   dtheta: float = 0.0) -> float:
    """Modulus of the off-diagonal kernel, weighted by exp(-k(phi + phi')).

    Hermitian symmetry gives ``offdiag(x, x2, dtheta) = offdiag(x2, x, -dtheta)``
    exactly, and the diagonal value reproduces :func:`pdf_local`.
    """
    _check_eval_x(d, x)
    _check_eval_x(d, x2)
    return _table(d, cfg).offdiag(x, x2, dtheta)


def profile_local(d: DualPotential, cfg: PbkConfig, xs) -> DensityProfile:
    for x in np.asarray(xs, dtype=float):
        _check_eval_x(d, float(x))
    return _table(d, cfg).profile(xs)
