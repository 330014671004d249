"""Front-fluctuation constants: A1, A2, and the drift/variance pair derived
from them.

A1 is a ratio of weighted profile integrals with a Beta-function closed form
for the cubic family (the independent oracle). A2 is a time integral of the
squared semigroup kernel against profile weights; it is computed by
propagating kernel columns and integrating on a square-root time grid, with a
fitted exponential extrapolation of the truncated tail. A second assembly
route through the flow coordinate's second derivative is computed from the
same columns and must agree — a nontrivial consistency check of the kernel
conventions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DivergentIntegralError, ParameterError, TruncationError
from .grids import Grid1D
from .linearized import build_operator, _source_psi, cn_step
from .profile import WaveProfile, analytic_profile
from .reaction import ReactionTerm, cubic_term, f_derivatives
from .weighted import _weighted_quad

_trapz = np.trapezoid if hasattr(np, "trapezoid") else np.trapz

__all__ = [
    "FrontConstants",
    "SweepConfig",
    "compute_A1",
    "compute_A2",
    "compute_mu_sigma",
    "sweep",
    "betaln",
]


def betaln(a: float, b: float) -> float:
    """log Beta via log-Gamma (the closed-form oracle's only ingredient)."""
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


@dataclass
class FrontConstants:
    """Constants of the front's limiting drift-diffusion law at one alpha."""

    alpha: float
    A1: float = float("nan")
    A1_closed: float = float("nan")
    A2: float = float("nan")
    mu: float = float("nan")
    sigma2: float = float("nan")
    trunc_T: float = float("nan")
    h: float = float("nan")
    x_min: float = float("nan")
    x_max: float = float("nan")
    dt: float = float("nan")
    status: str = "ok"
    # error budget pieces (not serialized to the frozen CSV schema)
    err_quad: float = float("nan")
    err_trunc: float = float("nan")


@dataclass(frozen=True)
class SweepConfig:
    """Shared grid/propagation configuration of an alpha sweep."""

    x_min: float = -40.0
    x_max: float = 40.0
    h: float = 0.02
    dt: float = 1e-3
    trunc_T: float = 30.0
    threads: int = 1


def _check_alpha_regime(alpha: float):
    if not (0.0 <= alpha < 1.5):
        raise DivergentIntegralError(
            f"constants diverge outside the fully pushed band: alpha={alpha}"
        )


def _adaptive_quad(profile: WaveProfile, values_fn, q: float, kappa_l: float, kappa_r: float, h: float) -> float:
    """Trapezoid of values_fn(x) * e^{qx} on a domain widened until both tail
    exponents have decayed by e^{-30}; the profile evaluates off-grid exactly."""
    if kappa_l <= 0.0 or kappa_r <= 0.0:
        raise DivergentIntegralError(
            f"tail exponents ({kappa_r:.3g}, {kappa_l:.3g}) must both be positive"
        )
    x_lo = min(profile.grid.x_min, -30.0 / kappa_l)
    x_hi = max(profile.grid.x_max, 30.0 / kappa_r)
    n = int(np.ceil((x_hi - x_lo) / h)) + 1
    x = x_lo + h * np.arange(n)
    return _weighted_quad(values_fn(x), x, q, h)


def compute_A1(profile: WaveProfile, alpha: float) -> tuple[float, float]:
    """Quadrature A1 plus its Beta closed form (cubic family; nan otherwise).

    A1 = (integral of dm^2 m(1-m) e^{2 alpha x}) / (integral of dm^2 e^{alpha x})^2.
    The quadrature runs at the profile's spacing on an adaptively extended
    domain: near alpha = 1.4 the numerator's right tail decays only like
    e^{-(3-2 alpha)x}, which the default box truncates at ~5e-4 — far above
    the 1e-6 oracle agreement this function is accountable for.
    """
    _check_alpha_regime(alpha)
    if abs(alpha - profile.alpha) > 1e-12:
        raise ParameterError("alpha does not match the profile's")
    lp, lm = profile.lambda_plus, profile.lambda_minus
    h = profile.grid.h

    def num_fn(x):
        m = np.clip(profile.m_at(x), 0.0, 1.0)
        dm = profile.dm_at(x)
        return dm * dm * m * (1.0 - m)

    def den_fn(x):
        dm = profile.dm_at(x)
        return dm * dm

    num = _adaptive_quad(profile, num_fn, 2.0 * alpha, 3.0 * lm + 2.0 * alpha, 3.0 * lp - 2.0 * alpha, h)
    den = _adaptive_quad(profile, den_fn, alpha, 2.0 * lm + alpha, 2.0 * lp - alpha, h)
    A1 = num / (den * den)

    if profile._term.kind == "cubic":
        A1_closed = math.exp(
            betaln(3.0 - 2.0 * alpha, 3.0 + 2.0 * alpha)
            - 2.0 * betaln(2.0 - alpha, 2.0 + alpha)
        )
    else:
        A1_closed = float("nan")
    return float(A1), float(A1_closed)


def compute_A2(
    profile: WaveProfile,
    term: ReactionTerm,
    alpha: float,
    trunc_T: float = 30.0,
    dt: float = 1e-3,
    h: float | None = None,
    source_window: float = 20.0,
    source_stride: int = 2,
    return_detail: bool = False,
):
    """The kernel-squared time integral A2, by Crank-Nicolson column propagation.

    The time axis is integrated in s = sqrt(t) (the kernel's t^{-1/2}
    small-time singularity becomes regular), with uniform spacing
    ds = sqrt(dt/10); the propagation steps are graded to land exactly on the
    quadrature times. dt therefore sets the refinement scale: halving dt
    quarters both the quadrature and the stepping error, which is what the
    halving consistency check measures. The tail beyond trunc_T is added by
    exponential extrapolation at the fitted decay rate of the integrand, and
    must stay under 0.1% of A2's scale or the computation is rejected.

    Sources sit on every source_stride-th node inside [-source_window,
    source_window], anchored so the x = 0 node is always a source (the alpha=0
    cancellation is exact only on a symmetric source set).
    """
    _check_alpha_regime(alpha)
    if abs(alpha - profile.alpha) > 1e-12:
        raise ParameterError("alpha does not match the profile's")
    grid = profile.grid
    if h is not None and abs(h - grid.h) > 1e-12:
        raise ParameterError("h does not match the profile grid; rebuild the profile")
    if trunc_T <= 1.0:
        raise ParameterError("need trunc_T > 1")

    x = grid.x
    hh = grid.h
    m = profile.m.values
    dm = profile.dm.values
    _, fpp = f_derivatives(term, m)
    a = fpp * dm  # x-integrand factor: f''(m) dm (weights cancel in the sym frame)
    B = _weighted_quad(dm * dm, x, alpha, hh)

    i0 = grid.index_of(0.0)
    idx = np.arange(grid.n)
    sel = (np.abs(x) <= source_window + 1e-12) & ((idx - i0) % source_stride == 0)
    sources = idx[sel]
    y = x[sources]
    # y-quadrature weight: m(1-m) e^{2 alpha y} dy with dy = stride * h
    wy = m[sources] * (1.0 - m[sources]) * np.exp(2.0 * alpha * y) * (source_stride * hh)

    op = build_operator(profile, term, eta=0.0)
    psi = _source_psi(op, sources)

    ds = math.sqrt(dt / 10.0)
    s_grid = np.arange(0.0, math.sqrt(trunc_T) + 0.5 * ds, ds)
    n_s = s_grid.size
    t_grid = s_grid * s_grid

    c = np.zeros(n_s)  # time integrand c(t_j)
    S = np.zeros(sources.size)  # per-source time integrals (route 2)
    Ix = np.zeros(sources.size)
    for j in range(1, n_s):
        psi = cn_step(op, psi, t_grid[j] - t_grid[j - 1])
        Ix = hh * ((psi * psi).T @ a)  # integral over x of p^2 f''(m) dm e^{alpha x}
        c[j] = float(Ix @ wy)
        # trapezoid in s of 2 s I(s): interior weight ds, endpoint ds/2
        w_s = ds if j < n_s - 1 else 0.5 * ds
        S += w_s * 2.0 * s_grid[j] * Ix
    A2_main = float(_trapz(2.0 * s_grid * c, dx=ds))

    # tail: fit the exponential decay rate on the last fifth of the samples;
    # when the whole integrand is at round-off (the symmetric alpha = 0 case)
    # there is nothing to extrapolate
    tail_lo = int(0.8 * n_s)
    ct = np.abs(c[tail_lo:])
    tt = t_grid[tail_lo:]
    good = ct > 1e-300
    signal = float(np.max(np.abs(c)))
    rate = float("nan")
    tail_add = 0.0
    S_tail = np.zeros_like(S)
    if good.sum() >= 4 and signal > 1e-12 and np.max(ct) > 1e-10 * signal:
        slope = np.polyfit(tt[good], np.log(ct[good]), 1)[0]
        rate = -float(slope)
        if rate <= 0.0:
            raise TruncationError(
                f"time integrand is not decaying at trunc_T={trunc_T} (rate {rate:.3g})"
            )
        tail_add = c[-1] / rate
        S_tail = Ix / rate

    A2 = (A2_main + tail_add) / B
    scale = max(abs(A2), 0.05)
    err_trunc = abs(tail_add) / B
    if err_trunc > 1e-3 * scale:
        raise TruncationError(
            f"discarded tail {err_trunc:.3g} exceeds 0.1% of A2 scale {scale:.3g}; "
            f"raise trunc_T (integrand {c[-1]:.3g} at T={trunc_T}, rate {rate:.3g})"
        )

    # second route: assemble through the second derivative of the limiting
    # shift: A2 = -sum_y D2(y) m(1-m) e^{2 alpha y} dy - (alpha/2) A1, where
    # D2(y) = -(alpha/2) dm(y)^2/B^2 - S(y)/B. Same kernel data, different
    # cancellation structure - a consistency check, not an independent oracle.
    A1_quad, _ = compute_A1(profile, alpha)
    dm_src = dm[sources]
    D2 = -(0.5 * alpha) * dm_src * dm_src / (B * B) - (S + S_tail) / B
    A2_route2 = float(-(D2 @ wy) - 0.5 * alpha * A1_quad)

    if return_detail:
        return {
            "A2": float(A2),
            "A2_route2": A2_route2,
            "A2_main": A2_main / B,
            "tail_add": float(tail_add / B),
            "rate": rate,
            "t_grid": t_grid,
            "c": c / B,
            "err_trunc": float(err_trunc),
            "sources": sources,
        }
    return float(A2)


def compute_mu_sigma(constants_in: FrontConstants) -> FrontConstants:
    """Fill mu = (alpha/4) A1 + A2/2 and sigma2 = A1 from computed A1, A2."""
    if not np.isfinite(constants_in.A1) or not np.isfinite(constants_in.A2):
        raise ParameterError("A1 and A2 must be computed first")
    return replace(
        constants_in,
        mu=constants_in.alpha / 4.0 * constants_in.A1 + 0.5 * constants_in.A2,
        sigma2=constants_in.A1,
    )


def _one_alpha(alpha: float, cfg: SweepConfig) -> FrontConstants:
    out = FrontConstants(
        alpha=float(alpha),
        trunc_T=cfg.trunc_T,
        h=cfg.h,
        x_min=cfg.x_min,
        x_max=cfg.x_max,
        dt=cfg.dt,
    )
    try:
        grid = Grid1D.from_bounds(cfg.x_min, cfg.x_max, cfg.h)
        term = cubic_term(alpha)
        prof = analytic_profile(alpha, grid)
        A1, A1_closed = compute_A1(prof, alpha)
        detail = compute_A2(
            prof, term, alpha, trunc_T=cfg.trunc_T, dt=cfg.dt, return_detail=True
        )
        out = replace(
            out,
            A1=A1,
            A1_closed=A1_closed,
            A2=detail["A2"],
            err_quad=abs(detail["A2"] - detail["A2_route2"]),
            err_trunc=detail["err_trunc"],
        )
        out = compute_mu_sigma(out)
    except Exception as exc:  # per-alpha failures recorded, sweep continues
        out = replace(out, status=f"error: {type(exc).__name__}: {exc}")
    return out


def sweep(alpha_grid, config: SweepConfig | None = None) -> list[FrontConstants]:
    """Constants for each alpha on a shared grid configuration.

    Failures are recorded in the row's status and do not abort the sweep.
    Results are ordered like alpha_grid regardless of execution order.
    """
    cfg = config or SweepConfig()
    alphas = [float(a) for a in alpha_grid]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(lambda a: _one_alpha(a, cfg), alphas))
    return [_one_alpha(a, cfg) for a in alphas]
