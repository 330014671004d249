"""Reaction terms for the bistable front problem.

The closed-form family is the cubic f(u) = u(1-u)(2u-1+alpha), where alpha is
simultaneously the wave speed and the imbalance of the two stable states.
General nonlinearities enter as tabulated samples with derivative tables; they
get C^2 spline interpolation but no closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import OutOfDomainError, ParameterError, UnsupportedReactionError

__all__ = [
    "ReactionTerm",
    "cubic_term",
    "tabulated_term",
    "f_eval",
    "f_derivatives",
    "potential_F",
    "validate_pushed",
]

FULLY_PUSHED = "fully_pushed"
SEMI_PUSHED = "semi_pushed"
OUT_OF_RANGE = "out_of_range"


@dataclass(frozen=True)
class ReactionTerm:
    """A reaction nonlinearity plus the wave-speed parameter alpha.

    kind is "cubic" or "tabulated". Cubic terms know everything analytically.
    Tabulated terms carry sample arrays and spline interpolants built at
    construction time; evaluation outside the sample range raises.
    """

    kind: str
    alpha: float
    u_samples: Optional[np.ndarray] = field(default=None, repr=False)
    _f: object = field(default=None, repr=False, compare=False)
    _fp: object = field(default=None, repr=False, compare=False)
    _fpp: object = field(default=None, repr=False, compare=False)
    _F: object = field(default=None, repr=False, compare=False)


def cubic_term(alpha: float) -> ReactionTerm:
    """The cubic family member with imbalance alpha (no range restriction here;
    regime checks live in validate_pushed and the profile module)."""
    if not np.isfinite(alpha):
        raise ParameterError("alpha must be finite")
    return ReactionTerm(kind="cubic", alpha=float(alpha))


def tabulated_term(alpha, u_samples, f_samples, fp_samples, fpp_samples) -> ReactionTerm:
    """Reaction term from samples of f, f', f'' on an increasing u-grid.

    The derivative tables are interpolated directly (never differenced), so
    callers are responsible for their mutual consistency.
    """
    u = np.asarray(u_samples, dtype=float)
    fs = np.asarray(f_samples, dtype=float)
    fps = np.asarray(fp_samples, dtype=float)
    fpps = np.asarray(fpp_samples, dtype=float)
    if u.ndim != 1 or u.size < 4:
        raise ParameterError("need at least 4 samples")
    if np.any(np.diff(u) <= 0):
        raise ParameterError("u_samples must be strictly increasing")
    if not (fs.shape == fps.shape == fpps.shape == u.shape):
        raise ParameterError("sample arrays must share u_samples' shape")
    if u[0] > 0.0 or u[-1] < 1.0:
        raise ParameterError("sample range must cover [0, 1]")
    f_spline = CubicSpline(u, fs)
    tol = 1e-8 * max(1.0, float(np.max(np.abs(fs))))
    if abs(f_spline(0.0)) > tol or abs(f_spline(1.0)) > tol:
        raise ParameterError("tabulated f must vanish at u=0 and u=1")
    return ReactionTerm(
        kind="tabulated",
        alpha=float(alpha),
        u_samples=u,
        _f=f_spline,
        _fp=CubicSpline(u, fps),
        _fpp=CubicSpline(u, fpps),
        _F=f_spline.antiderivative(),
    )


def _check_tab_domain(term: ReactionTerm, u):
    lo, hi = term.u_samples[0], term.u_samples[-1]
    if np.any(u < lo) or np.any(u > hi):
        raise OutOfDomainError(f"u outside tabulated range [{lo}, {hi}]")


def f_eval(term: ReactionTerm, u):
    """f(u). Vectorized; scalar in, scalar out."""
    u_arr = np.asarray(u, dtype=float)
    if term.kind == "cubic":
        a = term.alpha
        out = u_arr * (1.0 - u_arr) * (2.0 * u_arr - 1.0 + a)
    else:
        _check_tab_domain(term, u_arr)
        out = term._f(u_arr)
    return float(out) if np.isscalar(u) or u_arr.ndim == 0 else np.asarray(out)


def f_derivatives(term: ReactionTerm, u):
    """(f'(u), f''(u)), analytically for the cubic family."""
    u_arr = np.asarray(u, dtype=float)
    if term.kind == "cubic":
        a = term.alpha
        # f = -2u^3 + (3-a)u^2 + (a-1)u
        fp = -6.0 * u_arr**2 + 2.0 * (3.0 - a) * u_arr + (a - 1.0)
        fpp = -12.0 * u_arr + 2.0 * (3.0 - a)
    else:
        _check_tab_domain(term, u_arr)
        fp = term._fp(u_arr)
        fpp = term._fpp(u_arr)
    if np.isscalar(u) or u_arr.ndim == 0:
        return float(fp), float(fpp)
    return np.asarray(fp), np.asarray(fpp)


def potential_F(term: ReactionTerm, u):
    """F(u) = -integral of f from 0 to u (so F(0) = 0 and F' = -f)."""
    u_arr = np.asarray(u, dtype=float)
    if term.kind == "cubic":
        a = term.alpha
        out = 0.5 * u_arr**4 - (3.0 - a) / 3.0 * u_arr**3 - (a - 1.0) / 2.0 * u_arr**2
    else:
        _check_tab_domain(term, u_arr)
        out = -(term._F(u_arr) - term._F(0.0))
    return float(out) if np.isscalar(u) or u_arr.ndim == 0 else np.asarray(out)


def validate_pushed(term: ReactionTerm) -> str:
    """Classify the cubic term's propagation regime by its alpha."""
    if term.kind != "cubic":
        raise UnsupportedReactionError("regime classification is defined for the cubic family only")
    a = term.alpha
    if 0.0 < a < 1.5:
        return FULLY_PUSHED
    if 1.5 <= a < 2.0:
        return SEMI_PUSHED
    return OUT_OF_RANGE
