"""Second-order finite-difference stencils on uniform grids.

Central differences in the interior, one-sided second-order stencils at the
two boundary nodes, so the whole field (not just the interior) carries an
O(h^2) derivative. Shared by the residual, norm, and energy code.
"""

from __future__ import annotations

import numpy as np

__all__ = ["diff1", "diff2"]


def diff1(values: np.ndarray, h: float) -> np.ndarray:
    """First derivative, O(h^2) everywhere."""
    v = np.asarray(values, dtype=float)
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return d


def diff2(values: np.ndarray, h: float) -> np.ndarray:
    """Second derivative, O(h^2) everywhere (4-point one-sided rows at the ends)."""
    v = np.asarray(values, dtype=float)
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
    d[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return d
