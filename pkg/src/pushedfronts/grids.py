"""Uniform 1-D grids and grid-sampled fields.

Everything in this package lives on a uniform grid; keeping the grid object
tiny and hashable-by-value lets field operations check compatibility cheaply
instead of comparing coordinate arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, ParameterError

__all__ = ["Grid1D", "Field"]


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid x_i = x_min + i*h, i = 0..n-1, with x_{n-1} = x_max."""

    x_min: float
    x_max: float
    h: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise ParameterError("grid endpoints must be finite")
        if self.x_max <= self.x_min:
            raise ParameterError("need x_max > x_min")
        if self.h <= 0:
            raise ParameterError("need h > 0")
        if self.n < 3:
            raise ParameterError("need at least 3 nodes")
        # endpoints and spacing must describe the same grid
        if abs(self.x_max - self.x_min - (self.n - 1) * self.h) > 1e-9 * max(1.0, abs(self.h)):
            raise ParameterError("inconsistent grid: x_max - x_min != (n-1)*h")

    @classmethod
    def from_bounds(cls, x_min: float, x_max: float, h: float) -> "Grid1D":
        """Grid covering [x_min, x_max] with spacing h ((x_max-x_min)/h must be near-integer)."""
        if h <= 0:
            raise ParameterError("need h > 0")
        ratio = (x_max - x_min) / h
        n = int(round(ratio)) + 1
        if abs(ratio - round(ratio)) > 1e-8:
            raise ParameterError("domain length is not an integer multiple of h")
        return cls(float(x_min), float(x_max), float(h), n)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.n)

    def index_of(self, x0: float) -> int:
        """Index of the grid node nearest to x0 (x0 must be inside the domain)."""
        if not (self.x_min - 0.5 * self.h <= x0 <= self.x_max + 0.5 * self.h):
            raise ParameterError(f"x0={x0} outside grid [{self.x_min}, {self.x_max}]")
        return int(round((x0 - self.x_min) / self.h))

    def refine(self, factor: int = 2) -> "Grid1D":
        """Same domain, spacing h/factor (existing nodes are preserved)."""
        if factor < 1:
            raise ParameterError("refinement factor must be >= 1")
        return Grid1D(self.x_min, self.x_max, self.h / factor, (self.n - 1) * factor + 1)


@dataclass
class Field:
    """Real scalar field sampled on a Grid1D. Values must be finite."""

    grid: Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise GridMismatchError(
                f"values shape {self.values.shape} does not match grid size {self.grid.n}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ParameterError("field values must be finite")

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def same_grid(*fields: Field) -> Grid1D:
    """Shared grid of the given fields, or GridMismatchError."""
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise GridMismatchError("fields live on different grids")
    return g
