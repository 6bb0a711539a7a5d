"""Exception types shared across the package."""

from __future__ import annotations

from .quadrature import QuadratureError

__all__ = ["PbkError", "DomainError", "ConvexityError", "QuadratureError"]


class PbkError(RuntimeError):
    """Base class for numeric failures raised by this package."""


class DomainError(PbkError):
    """An argument left the valid moment/log-radius domain."""


class ConvexityError(PbkError):
    """A potential failed the strict-convexity requirement."""

    def __init__(self, message: str, t_bad: float | None = None):
        super().__init__(message)
        self.t_bad = t_bad
