"""Euler-Maclaurin summation and incomplete-Laplace expansions.

Three layers:

* exact rational Bernoulli numbers and the Euler-Maclaurin tail formula;
* the operator calculus on smooth amplitudes: ``delta0 f = (f(t) - f(0))/t``
  and ``D = d/dt . delta0``, which drive the expansion of incomplete Gaussian
  integrals ``(2 pi)^(-1/2) hbar^(-1) integral_{-inf}^x exp(-t^2/2 hbar^2) f``
  in powers of hbar with a certified remainder;
* the density-level applications: the edge expansion of the local-kernel sum
  (integral + endpoint corrections ``A_j``) and the theorem-level leading term
  ``Phi(sqrt(2 u_xx(eps)) * (x - eps) sqrt(k))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import PbkError
from .legendre import DualPotential
from .local_kernel import PbkConfig, log_norm_constant
from .model import norm_cdf
from .quadrature import integrate, integrate_decaying

__all__ = [
    "bernoulli",
    "SmoothFn",
    "delta0",
    "D_op",
    "Expansion",
    "EmTail",
    "euler_maclaurin_tail",
    "em_direct_sum",
    "em_pdf_sum",
    "incomplete_gaussian",
    "general_exponent",
    "pdf_leading",
    "fd_derivative",
]


class DerivativeBudgetError(PbkError):
    """An operation needed more derivatives than the amplitude declares."""


# ----------------------------------------------------------------------
# Bernoulli numbers and polynomials
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli(j: int) -> Fraction:
    """Exact Bernoulli number (convention beta_1 = -1/2), closed recurrence."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return Fraction(1)
    # sum_{i=0}^{m} C(m+1, i) B_i = 0
    acc = Fraction(0)
    for i in range(j):
        acc += math.comb(j + 1, i) * bernoulli(i)
    return -acc / (j + 1)


def _bernoulli_poly_max(m: int) -> float:
    """max over [0,1] of |B_m(s)|, for the Euler-Maclaurin residual bound."""
    s = np.linspace(0.0, 1.0, 201)
    coeffs = [float(math.comb(m, i) * bernoulli(i)) for i in range(m + 1)]
    vals = sum(c * s ** (m - i) for i, c in enumerate(coeffs))
    return float(np.max(np.abs(vals))) * 1.0001


# ----------------------------------------------------------------------
# Smooth amplitudes with a derivative budget
# ----------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)   # map to [0, 1]
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


class SmoothFn:
    """A scalar function carrying derivatives up to a declared max order."""

    def __init__(self, value_fn, deriv_fn, max_order: int, label: str = ""):
        self._value = value_fn
        self._deriv = deriv_fn
        self.max_order = int(max_order)
        self.label = label

    def value(self, t: float) -> float:
        return float(self._value(float(t)))

    __call__ = value

    def derivative(self, order: int, t: float) -> float:
        if order == 0:
            return self.value(t)
        if order > self.max_order:
            raise DerivativeBudgetError(
                f"derivative of order {order} requested; "
                f"only {self.max_order} declared for {self.label or 'amplitude'}")
        return float(self._deriv(int(order), float(t)))

    @classmethod
    def from_derivatives(cls, fns, label: str = "") -> "SmoothFn":
        """Build from a list [f, f', f'', ...] of callables."""
        fns = list(fns)

        def deriv(order, t):
            return fns[order](t)

        return cls(fns[0], deriv, max_order=len(fns) - 1, label=label)

    @classmethod
    def from_callable(cls, f, max_order: int, step: float = 1e-3,
                      label: str = "") -> "SmoothFn":
        """Wrap a bare callable; derivatives by Richardson-extrapolated FD."""
        def deriv(order, t):
            return fd_derivative(f, t, order=order, step=step)

        return cls(f, deriv, max_order=max_order, label=label)

    @classmethod
    def polynomial(cls, coeffs, label: str = "poly") -> "SmoothFn":
        """Polynomial sum c_i t^i with exact derivatives of every order."""
        c = np.asarray(coeffs, dtype=float)

        def value(t):
            return float(np.polyval(c[::-1], t))

        def deriv(order, t):
            cc = c.copy()
            for _ in range(order):
                cc = cc[1:] * np.arange(1, len(cc))
            return float(np.polyval(cc[::-1], t)) if len(cc) else 0.0

        return cls(value, deriv, max_order=10 ** 6, label=label)


_FD_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def fd_derivative(f, t: float, order: int = 1, step: float = 1e-3,
                  richardson: bool = True) -> float:
    """Central finite difference of ``f`` with one Richardson level.

    The base stencils are second-order accurate; the Richardson combination
    ``(4 D(h/2) - D(h)) / 3`` removes the leading h^2 term.
    """
    if order == 0:
        return float(f(t))
    if order not in _FD_STENCILS:
        raise ValueError("fd_derivative supports orders 1..4")

    def apply(h):
        return sum(w * f(t + i * h) for i, w in _FD_STENCILS[order]) / h ** order

    d1 = apply(step)
    if not richardson:
        return d1
    d2 = apply(step / 2.0)
    return (4.0 * d2 - d1) / 3.0


class _Delta0(SmoothFn):
    """The divided-difference operator delta0 applied to a SmoothFn.

    Values and derivatives switch between three equivalent forms: the direct
    quotient with a Leibniz recursion away from 0, a Taylor series from the
    inner derivatives at 0 when it converges, and the integral form
    ``integral_0^1 lambda^n f^(n+1)(lambda t) d lambda`` (Gauss-Legendre) as
    the fallback near 0.
    """

    _SMALL = 0.25

    def __init__(self, inner: SmoothFn):
        if inner.max_order < 1:
            raise DerivativeBudgetError("delta0 needs at least one derivative")
        self.inner = inner
        self._memo: dict = {}
        super().__init__(self._val, self._derivn, inner.max_order - 1,
                         label=f"delta0({inner.label})")

    def _val(self, t):
        return self._entry(0, t)

    def _derivn(self, order, t):
        return self._entry(order, t)

    def _series(self, n: int, t: float):
        # (delta0 f)^(n)(t) = sum_{m >= n+1} f^(m)(0) * (m-1)!/(m-1-n)! / m! * t^(m-1-n)
        budget = min(self.inner.max_order, n + 64)
        total = 0.0
        scale = 0.0
        last = math.inf
        for m in range(n + 1, budget + 1):
            fm = self.inner.derivative(m, 0.0)
            coef = (math.factorial(m - 1) //
                    math.factorial(m - 1 - n)) / math.factorial(m)
            term = fm * coef * t ** (m - 1 - n)
            total += term
            scale = max(scale, abs(term))
            last = abs(term)
            if scale > 0 and last < 1e-16 * scale and m - n > 3:
                return total
        if scale == 0.0:
            return 0.0
        if last <= 1e-13 * max(scale, abs(total)):
            return total
        return None  # did not converge within the budget

    def _gauss(self, n: int, t: float):
        lam = _GL_NODES
        vals = np.array([self.inner.derivative(n + 1, li * t) for li in lam])
        return float((_GL_WEIGHTS * lam ** n) @ vals)

    def _entry(self, n: int, t: float) -> float:
        key = (n, t)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if abs(t) < self._SMALL:
            out = self._series(n, t)
            if out is None:
                if n + 1 > self.inner.max_order:
                    raise DerivativeBudgetError(
                        "delta0 fallback needs one more inner derivative")
                out = self._gauss(n, t)
        elif n == 0:
            out = (self.inner.value(t) - self.inner.value(0.0)) / t
        else:
            # Leibniz on t * (delta0 f)(t) = f(t) - f(0)
            out = (self.inner.derivative(n, t) - n * self._entry(n - 1, t)) / t
        self._memo[key] = out
        return out


class _Shifted(SmoothFn):
    """Derivative-of: exposes g^(n) = inner^(n+1)."""

    def __init__(self, inner: SmoothFn, shift: int = 1):
        self.inner = inner
        self.shift = shift
        if inner.max_order < shift:
            raise DerivativeBudgetError("not enough derivatives to differentiate")
        super().__init__(lambda t: inner.derivative(shift, t),
                         lambda n, t: inner.derivative(n + shift, t),
                         inner.max_order - shift,
                         label=f"d^{shift}({inner.label})")


def delta0(f: SmoothFn) -> SmoothFn:
    """``delta0 f (t) = (f(t) - f(0))/t`` with ``delta0 f (0) = f'(0)``."""
    return _Delta0(f)


def D_op(f: SmoothFn) -> SmoothFn:
    """``D f = (delta0 f)'``; costs two derivative orders per application."""
    if f.max_order < 2:
        raise DerivativeBudgetError("D needs a derivative budget of at least 2")
    return _Shifted(_Delta0(f), 1)


def _product(f: SmoothFn, g: SmoothFn, label="") -> SmoothFn:
    order = min(f.max_order, g.max_order)

    def deriv(n, t):
        return sum(math.comb(n, i) * f.derivative(i, t) * g.derivative(n - i, t)
                   for i in range(n + 1))

    return SmoothFn(lambda t: f.value(t) * g.value(t), deriv, order,
                    label=label or f"({f.label})*({g.label})")


def _rescaled(f: SmoothFn, scale: float) -> SmoothFn:
    """g(t) = f(t / scale)."""
    s = 1.0 / scale
    return SmoothFn(lambda t: f.value(t * s),
                    lambda n, t: f.derivative(n, t * s) * s ** n,
                    f.max_order, label=f"rescale({f.label})")


# ----------------------------------------------------------------------
# Expansions
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Expansion:
    """Finite expansion ``sum_j value_j * hbar^power_j`` plus a remainder bound.

    ``phi_coefficients``/``phi_prime_coefficients`` hold the structured
    Gaussian-integral form (coefficients of Phi and Phi') when applicable.
    """

    hbar: float
    terms: tuple
    remainder_bound: float
    phi_coefficients: tuple = field(default=())
    phi_prime_coefficients: tuple = field(default=())

    def __post_init__(self):
        powers = [p for p, _ in self.terms]
        if any(b <= a for a, b in zip(powers, powers[1:])):
            raise ValueError("expansion powers must be strictly increasing")
        if not (self.remainder_bound >= 0):
            raise ValueError("remainder_bound must be >= 0")

    def total(self) -> float:
        return float(sum(v * self.hbar ** p for p, v in self.terms))


def _merge_terms(pairs) -> tuple:
    acc: dict = {}
    for p, v in pairs:
        acc[p] = acc.get(p, 0.0) + v
    return tuple(sorted(acc.items()))


# ----------------------------------------------------------------------
# Euler-Maclaurin
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class EmTail:
    """Euler-Maclaurin value of a tail sum and its residual-integral bound."""

    value: float
    residual_bound: float
    integral: float


def euler_maclaurin_tail(p: SmoothFn, a: int, m: int = 2,
                         rel_tol: float = 1e-12) -> EmTail:
    """``sum_{n >= a} p(n)`` via integral, endpoint and Bernoulli corrections.

    Requires ``p`` and its derivatives (up to order m) to decay at infinity;
    a growing tail raises through the quadrature layer.  The returned bound
    covers the dropped residual integral
    ``integral_a^inf B_m({1-t})/m! p^(m)(t) dt``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if p.max_order < m:
        raise DerivativeBudgetError(f"Euler-Maclaurin with m={m} needs "
                                    f"{m} derivatives, have {p.max_order}")
    integral = integrate_decaying(p.value, float(a), rel_tol=rel_tol)
    value = integral.value + 0.5 * p.value(float(a))
    for j in range(1, m):
        beta = float(bernoulli(j + 1))
        if beta == 0.0:
            continue
        value -= beta / math.factorial(j + 1) * p.derivative(j, float(a))
    abs_dm = integrate_decaying(
        lambda t: abs(p.derivative(m, float(t))), float(a), rel_tol=2e-3)
    bound = _bernoulli_poly_max(m) / math.factorial(m) * abs_dm.value \
        + integral.error_estimate
    return EmTail(float(value), float(bound), float(integral.value))


# ----------------------------------------------------------------------
# The density-edge Euler-Maclaurin expansion
# ----------------------------------------------------------------------

def _edge_data(d: DualPotential, cfg: PbkConfig, x: float):
    cfg = cfg.bound(d)
    if not (x < cfg.eps_prime):
        raise PbkError(f"edge expansion is valid for x < eps'={cfg.eps_prime}")
    if not (0.0 < x < d.a):
        raise PbkError(f"x={x!r} outside (0, a)")
    k = cfg.k
    hbar = 1.0 / math.sqrt(k)
    n_lo, n_hi = cfg.n_lo, cfg.n_hi

    log_amp_cache: dict = {}

    def log_amp(nu: float) -> float:
        hit = log_amp_cache.get(nu)
        if hit is None:
            hit = log_norm_constant(d, cfg, nu) + math.log(hbar)
            log_amp_cache[nu] = hit
        return hit

    def q(s: float) -> float:
        nu = x - hbar * s
        expo = -2.0 * k * float(_U(d, nu, x)) + log_amp(nu)
        return math.exp(expo) if expo > -700.0 else 0.0

    return cfg, hbar, n_lo, n_hi, q, log_amp


def _U(d: DualPotential, nu: float, x: float) -> float:
    t = float(d.t_of_x(x))
    u_at_x = x * t - float(d.potential.phi(t))
    return float(d.u(nu)) - u_at_x + (x - nu) * t


def em_direct_sum(d: DualPotential, cfg: PbkConfig, x: float) -> float:
    """The exact hbar-weighted edge sum (equals ``pdf_local / k``)."""
    cfg, hbar, n_lo, n_hi, q, log_amp = _edge_data(d, cfg, x)
    k = cfg.k
    total = 0.0
    for n in range(n_lo, n_hi + 1):
        nu = n / k
        expo = -2.0 * k * _U(d, nu, x) + log_amp(nu)
        if expo > -700.0:
            total += math.exp(expo)
    return hbar * total


def em_pdf_sum(d: DualPotential, cfg: PbkConfig, x: float, m: int = 2,
               fd_scale: float = 1e-2) -> Expansion:
    """Euler-Maclaurin expansion of the edge sum at x, to order ``O(hbar^m)``.

    Terms: the incomplete Laplace integral at power 0, the endpoint term
    ``A_0 = q(xi)/2`` at power 1, and ``A_j = (-1)^(j-1) beta_{j+1}/(j+1)!
    q^(j)(xi)`` at power j+1.  (The summed corrections enter one power of
    hbar above the display indexing of the source sum; the direct-sum oracle
    pins this.)  Derivatives of q are Richardson finite differences at step
    ``fd_scale * sqrt(hbar)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > 6:
        raise DerivativeBudgetError("edge expansion supports m <= 6 "
                                    "(finite-difference derivative budget)")
    cfg, hbar, n_lo, n_hi, q, _ = _edge_data(d, cfg, x)
    xi = (x - n_lo / cfg.k) / hbar
    s_min = (x - cfg.sigma) / hbar  # amplitude trusted up to the plateau end

    integral = integrate(q, s_min, xi, rel_tol=1e-11, abs_floor=1e-16,
                         breakpoints=[s for s in (-4.0, -1.0, 0.0, 1.0)
                                      if s_min < s < xi])
    terms = [(0, integral.value), (1, 0.5 * q(xi))]
    step = fd_scale * math.sqrt(hbar)
    for j in range(1, m - 1):
        beta = float(bernoulli(j + 1))
        if beta != 0.0:
            qj = fd_derivative(q, xi, order=j, step=step)
            terms.append((j + 1, (-1.0) ** (j - 1) * beta /
                          math.factorial(j + 1) * qj))

    # residual-integral bound: max|B_m| / m! * integral |q^(m)| ds
    grid = np.linspace(max(s_min, xi - 8.0), xi, 33)
    qm = np.array([fd_derivative(q, float(s), order=min(m, 4), step=step)
                   for s in grid])
    bound = _bernoulli_poly_max(m) / math.factorial(m) * \
        float(np.trapezoid(np.abs(qm), grid)) * hbar ** m \
        + integral.error_estimate
    return Expansion(hbar, _merge_terms(terms), bound)


# ----------------------------------------------------------------------
# Incomplete Gaussian integrals (operator-calculus expansion)
# ----------------------------------------------------------------------

def gaussian_quadrature_value(x: float, hbar: float, alpha: SmoothFn,
                              rel_tol: float = 1e-12) -> float:
    """Direct quadrature of ``(2 pi)^(-1/2) hbar^(-1) int_{-inf}^x e^{-t^2/2h^2} alpha``."""
    y = x / hbar
    pref = 1.0 / math.sqrt(2.0 * math.pi)

    def integrand(r):
        s = y - r
        return pref * math.exp(-0.5 * s * s) * alpha.value(hbar * s)

    res = integrate_decaying(integrand, 0.0, rel_tol=rel_tol)
    return res.value


def incomplete_gaussian(x: float, hbar: float, alpha: SmoothFn,
                        N: int = 1) -> Expansion:
    """Expansion of the incomplete Gaussian integral of ``alpha`` to order 2N+2.

    The Phi coefficients are ``D^j alpha(0)`` (powers hbar^{2j}) and the Phi'
    coefficients ``-delta0 D^j alpha(x)`` (powers hbar^{2j+1}); the remainder
    is exactly ``hbar^{2N+2} Z(x, hbar; D^{N+1} alpha)``, bounded here by the
    quadrature of ``|D^{N+1} alpha|`` against the Gaussian.  The sign of the
    Phi' column comes out of the integration by parts
    ``t exp(-t^2/2h^2) = -h^2 (exp(-t^2/2h^2))'`` and is pinned against the
    quadrature oracle (``alpha(t) = t`` gives exactly ``-h Phi'(x/h)``).
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    need = 2 * N + 2
    if alpha.max_order < need:
        raise DerivativeBudgetError(
            f"incomplete_gaussian with N={N} needs {need} derivatives, "
            f"have {alpha.max_order}")
    y = x / hbar
    phi_y = norm_cdf(y)
    phip_y = math.exp(-0.5 * y * y) / math.sqrt(2.0 * math.pi)

    dj = alpha
    phi_coef = []
    phip_coef = []
    for j in range(N + 1):
        phi_coef.append((2 * j, dj.value(0.0)))
        phip_coef.append((2 * j + 1, -delta0(dj).value(x)))
        dj = D_op(dj)

    # dj is now D^{N+1} alpha; |remainder| <= int of its modulus
    pref = 1.0 / math.sqrt(2.0 * math.pi)

    def abs_tail(r):
        s = y - r
        return pref * math.exp(-0.5 * s * s) * abs(dj.value(hbar * s))

    tail = integrate_decaying(abs_tail, 0.0, rel_tol=2e-3, abs_floor=1e-18)
    bound = hbar ** (2 * N + 2) * (tail.value + tail.error_estimate)

    terms = [(p, c * phi_y) for p, c in phi_coef] + \
            [(p, c * phip_y) for p, c in phip_coef]
    return Expansion(hbar, _merge_terms(terms), bound,
                     phi_coefficients=tuple(phi_coef),
                     phi_prime_coefficients=tuple(phip_coef))


# ----------------------------------------------------------------------
# General exponents: f(t) = c t^2/2 + q(t), q cubic at 0
# ----------------------------------------------------------------------

def laplace_quadrature_value(x: float, hbar: float, c: float, q: SmoothFn,
                             alpha: SmoothFn, rel_tol: float = 1e-12) -> float:
    """Direct quadrature of ``(2 pi)^(-1/2) hbar^(-1) int_{-inf}^x e^{-f/h^2} alpha``."""
    pref = 1.0 / (math.sqrt(2.0 * math.pi) * hbar)

    def integrand(r):
        t = x - r
        expo = -(0.5 * c * t * t + q.value(t)) / hbar ** 2
        return pref * math.exp(expo) * alpha.value(t) if expo > -700.0 else 0.0

    res = integrate_decaying(integrand, 0.0, rel_tol=rel_tol, abs_floor=1e-18)
    return res.value


def general_exponent(x: float, hbar: float, c: float, q: SmoothFn,
                     alpha: SmoothFn, p: int = 1,
                     support=(-8.0, 8.0)) -> Expansion:
    """Expansion of the incomplete Laplace integral with exponent c t^2/2 + q.

    Deforms the exponent to its quadratic part: the j-th Taylor term in the
    deformation parameter is an incomplete Gaussian integral of ``q^j alpha``
    (rescaled by sqrt(c)), expanded by :func:`incomplete_gaussian`.  The
    remainder combines the Taylor bound (using the domination
    ``f_lambda >= t^2/4`` on the support) with the inner Gaussian remainders.
    The leading term is ``alpha(0)/sqrt(c) * Phi(sqrt(c) x / hbar)``.
    """
    if c <= 0:
        raise ValueError("quadratic coefficient c must be positive")
    for order in range(3):
        v = abs(q.derivative(order, 0.0))
        if v > 1e-10:
            raise PbkError(
                f"q must vanish to third order at 0; derivative {order} is {v:.3e}")
    ts = np.linspace(support[0], support[1], 801)
    for lam in (0.0, 1.0):
        f_lam = 0.5 * c * ts ** 2 + lam * np.array([q.value(t) for t in ts])
        bad = f_lam < 0.25 * ts ** 2 - 1e-12
        if np.any(bad):
            t_bad = float(ts[np.flatnonzero(bad)[0]])
            raise PbkError(
                f"domination f_lambda >= t^2/4 fails at t={t_bad:.6f} "
                f"(lambda={lam})")

    rc = math.sqrt(c)
    x_s = rc * x
    all_terms = []
    phi_c: list = []
    phip_c: list = []
    bound = 0.0
    budget = min(q.max_order, alpha.max_order)
    for j in range(p + 1):
        # g_j(tau) = q(tau/sqrt(c))^j * alpha(tau/sqrt(c))
        gj = _rescaled(alpha, rc)
        for _ in range(j):
            gj = _product(_rescaled(q, rc), gj)
        # inner order: enough that hbar^{2Nj+2-2j} clears hbar^{p+1}
        nj = min((budget - 2) // 2, (p + 1 + 2 * j + 1) // 2)
        if nj < 0:
            raise DerivativeBudgetError("amplitude budget too small")
        inner = incomplete_gaussian(x_s, hbar, gj, N=nj)
        scale = (-1.0) ** j / (math.factorial(j) * rc)
        shift = -2 * j
        # D^i(q^j alpha)(0) vanishes identically for 2i < 3j (order bookkeeping
        # of the operator calculus); suppress the rounding residue it leaves.
        y = x_s / hbar
        phi_y = norm_cdf(y)
        phi_part = [(pw, 0.0 if pw < 3 * j else v)
                    for pw, v in inner.phi_coefficients]
        phip_part = list(inner.phi_prime_coefficients)
        terms_j = [(pw, v * phi_y) for pw, v in phi_part] + \
                  [(pw, v * math.exp(-0.5 * y * y) / math.sqrt(2.0 * math.pi))
                   for pw, v in phip_part]
        all_terms.extend((pw + shift, scale * v) for pw, v in terms_j)
        phi_c.extend((pw + shift, scale * v) for pw, v in phi_part)
        phip_c.extend((pw + shift, scale * v) for pw, v in phip_part)
        bound += abs(scale) * inner.remainder_bound / hbar ** (2 * j)

    # Taylor remainder in the deformation parameter, via f_lambda >= t^2/4
    pref = 1.0 / (math.sqrt(2.0 * math.pi) * hbar ** (2 * p + 3))

    def h_rem(r):
        t = x - r
        expo = -0.25 * t * t / hbar ** 2
        if expo < -700.0:
            return 0.0
        return pref * math.exp(expo) * abs(q.value(t)) ** (p + 1) \
            * abs(alpha.value(t))

    taylor = integrate_decaying(h_rem, 0.0, rel_tol=2e-3, abs_floor=1e-18)
    bound += (taylor.value + taylor.error_estimate) / math.factorial(p + 1)

    return Expansion(hbar, _merge_terms(all_terms), bound,
                     phi_coefficients=_merge_terms(phi_c),
                     phi_prime_coefficients=_merge_terms(phip_c))


# ----------------------------------------------------------------------
# Theorem-level leading term
# ----------------------------------------------------------------------

def pdf_leading(d: DualPotential, eps: float, k: int, x: float) -> float:
    """Leading edge law ``Phi(sqrt(2 u_xx(eps)) * xi)`` with ``xi = (x-eps) sqrt(k)``.

    The weight convention ``exp(-2 k U)`` makes the Laplace quadratic
    coefficient ``2 u_xx(eps)``; for the model potential this reproduces the
    closed-form variance law ``Phi(sqrt(k)(x - eps)/sqrt(eps))`` near the edge
    (pinned against the exact Poisson-tail model rather than read off any one
    display).
    """
    xi = (x - eps) * math.sqrt(k)
    return norm_cdf(math.sqrt(2.0 * float(d.u_xx(eps))) * xi)
