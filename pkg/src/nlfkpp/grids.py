"""Uniform spatial grids and sampled fields.

These are the discrete carriers used by the direct solver, the moment
quadratures, and every grid-based cross-check. Dirichlet grids include both
endpoints (spacing (x_max-x_min)/(n-1), values pinned to ~0 there by the
boundary-mass monitor); periodic grids store one period without the
duplicate right endpoint.
"""

from dataclasses import dataclass

import numpy as np

BOUNDARY_MASS_TOL = 1e-12


@dataclass(frozen=True)
class FieldGrid:
    x_min: float
    x_max: float
    n: int
    boundary: str = "dirichlet"  # "dirichlet" | "periodic"

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"empty grid interval [{self.x_min}, {self.x_max}]")
        if self.n < 16:
            raise ValueError(f"grid needs at least 16 nodes, got {self.n}")
        if self.boundary not in ("dirichlet", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def dx(self):
        if self.boundary == "periodic":
            return (self.x_max - self.x_min) / self.n
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self):
        if self.boundary == "periodic":
            return self.x_min + self.dx * np.arange(self.n)
        return np.linspace(self.x_min, self.x_max, self.n)

    @property
    def quad_weights(self):
        """Composite trapezoid weights consistent with the boundary type."""
        w = np.full(self.n, self.dx)
        if self.boundary == "dirichlet":
            w[0] *= 0.5
            w[-1] *= 0.5
        return w


@dataclass(frozen=True)
class Field:
    grid: FieldGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (self.grid.n,):
            raise ValueError(f"values shape {v.shape} does not match grid size {self.grid.n}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")

    @classmethod
    def from_function(cls, grid, fn):
        return cls(grid, np.asarray(fn(grid.x), dtype=float))

    def mass(self):
        return float(np.dot(self.grid.quad_weights, self.values))

    def center(self):
        m = self.mass()
        return float(np.dot(self.grid.quad_weights, self.grid.x * self.values) / m)

    def variance(self):
        c = self.center()
        return float(np.dot(self.grid.quad_weights,
                            (self.grid.x - c) ** 2 * self.values) / self.mass())

    def norm_l2(self):
        return float(np.sqrt(np.dot(self.grid.quad_weights, self.values ** 2)))

    def boundary_fraction(self):
        """|boundary value| relative to the field maximum (dirichlet only)."""
        if self.grid.boundary != "dirichlet":
            return 0.0
        peak = float(np.max(np.abs(self.values)))
        if peak == 0.0:
            return 0.0
        return float(max(abs(self.values[0]), abs(self.values[-1])) / peak)

    def boundary_ok(self, tol=BOUNDARY_MASS_TOL):
        return self.boundary_fraction() <= tol


def auto_grid(center, spread, n=512, margin_sigmas=8.0, boundary="dirichlet"):
    """Grid sized to hold a state of the given center and standard-deviation
    spread. The default 8-sigma margin keeps Gaussian boundary values below
    the 1e-12 relative monitor (6 sigma would leave ~1e-8 there)."""
    half = margin_sigmas * spread
    return FieldGrid(center - half, center + half, n, boundary)
