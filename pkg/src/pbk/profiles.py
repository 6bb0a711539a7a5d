"""Density profiles: (x, value) grids tagged with the route that made them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROUTES = ("oracle", "local_kernel", "asymptotic", "model")


@dataclass(frozen=True)
class DensityProfile:
    """Samples of a density-type quantity at fixed k.

    ``values`` holds the raw route output (the unnormalized density rho for
    the oracle/local routes, the k^-n-normalized value for the model route);
    consumers apply 1/k scaling where a comparison needs it.
    """

    k: int
    route: str
    xs: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "xs", np.asarray(self.xs, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        if self.xs.ndim != 1 or self.xs.shape != self.values.shape:
            raise ValueError("xs and values must be matching 1-d arrays")
        if np.any(np.diff(self.xs) <= 0):
            raise ValueError("xs must be strictly increasing")
        if np.any(~np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("values must be finite and nonnegative")

    @property
    def samples(self):
        return list(zip(self.xs.tolist(), self.values.tolist()))

    def value_at(self, x: float) -> float:
        i = int(np.argmin(np.abs(self.xs - x)))
        if abs(self.xs[i] - x) > 1e-9 * max(1.0, abs(x)):
            raise KeyError(f"x={x!r} is not a grid point of this profile")
        return float(self.values[i])
