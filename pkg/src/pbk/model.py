"""The closed-form toy model: Poisson-tail density and its error-function law.

``model_pdf`` evaluates ``exp(-k x) * sum_{j >= m} (k x)^j / j!`` with
``m = ceil(eps k)``, i.e. the upper tail of a Poisson(kx) variable, through
the regularized incomplete gamma function.  ``model_pdf_direct`` is the
direct-summation fallback (the two must agree to 1e-12), and
``model_pdf_leading`` is the normal-distribution leading term
``Phi(sqrt(k)(x - eps)/sqrt(x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ModelQuery",
    "model_pdf",
    "model_pdf_direct",
    "model_pdf_leading",
    "norm_cdf",
    "gammainc_lower_reg",
]

_EPS = 2.22e-16
_FPMIN = 1e-300


def norm_cdf(z: float) -> float:
    """Standard normal distribution function Phi."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


@dataclass(frozen=True)
class ModelQuery:
    """Inputs of the toy model.

    ``threshold`` overrides the default vanishing-order index
    ``m = ceil(epsilon k)`` when the caller wants exact integer ``eps k``
    semantics.
    """

    k: int
    epsilon: float
    x: float
    threshold: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if not (self.x > 0) or not math.isfinite(self.x):
            raise ValueError("x must be positive and finite")
        if self.threshold is not None and self.threshold < 0:
            raise ValueError("threshold must be >= 0")

    @property
    def m(self) -> int:
        if self.threshold is not None:
            return self.threshold
        return math.ceil(self.epsilon * self.k - 1e-12)


def _gamma_p_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma by its power series (x < a + 1)."""
    term = 1.0 / a
    total = term
    n = a
    for _ in range(10_000):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    """Regularized upper incomplete gamma by Lentz's continued fraction."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def gammainc_lower_reg(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.

    Switches between the series and the continued fraction at the standard
    ``x = a + 1`` boundary so both tails keep full accuracy.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_p_series(a, x)
    return 1.0 - _gamma_q_contfrac(a, x)


def model_pdf(q: ModelQuery) -> float:
    """Poisson tail ``P(N >= m)`` for ``N ~ Poisson(k x)``; values in [0, 1]."""
    m = q.m
    if m == 0:
        return 1.0
    return min(1.0, max(0.0, gammainc_lower_reg(float(m), q.k * q.x)))


def model_pdf_direct(q: ModelQuery) -> float:
    """Direct summation of the Poisson tail (independent of the gamma path).

    Sums upward from the threshold when the mean sits below it, otherwise
    accumulates the complementary lower sum downward; both directions have
    decreasing terms, so plain summation is stable.
    """
    m = q.m
    lam = q.k * q.x
    if m == 0:
        return 1.0
    if m > lam:
        log_t = -lam + m * math.log(lam) - math.lgamma(m + 1.0)
        if log_t < -745.0:
            return 0.0
        term = math.exp(log_t)
        total = term
        j = m
        while True:
            j += 1
            term *= lam / j
            total += term
            if term < total * _EPS or j > m + 10_000_000:
                break
        return min(1.0, total)
    # complement: P = 1 - sum_{j < m}, summed downward from j = m - 1
    log_t = -lam + (m - 1) * math.log(lam) - math.lgamma(float(m))
    term = math.exp(log_t) if log_t > -745.0 else 0.0
    total = term
    for j in range(m - 1, 0, -1):
        term *= j / lam
        total += term
        if term < total * _EPS:
            break
    return max(0.0, 1.0 - total)


def model_pdf_leading(q: ModelQuery) -> float:
    """Leading error-function law ``Phi(sqrt(k)(x - eps)/sqrt(x))``."""
    return norm_cdf(math.sqrt(q.k) * (q.x - q.epsilon) / math.sqrt(q.x))
