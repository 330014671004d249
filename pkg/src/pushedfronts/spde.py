"""Stochastic front simulation and ensemble statistics of the shift.

The field w lives on a uniform grid in the co-moving frame, takes values in
[0, 1], and evolves by an IMEX step: implicit advection-diffusion, explicit
reaction, then one demographic-noise increment per node,

    w  ->  drift(w) + sqrt(w(1-w)/N) * sqrt(dt/h) * xi,

with xi i.i.d. standard normal and the amplitude evaluated at the incoming
field (Ito convention). The drift half is shared verbatim with the
deterministic relaxation flow, so the N -> inf limit of a step IS a flow
step, bit for bit.

Clipping keeps values in [0, 1] and extinguishes densities below half an
individual per cell (1/(2Nh)), saturating the mirror image near 1. Two
discretisation artifacts force this floor: the implicit solve couples every
node, leaking exponentially small positive values across the whole grid in
one step, and the Gaussian amplitude sqrt(w/N) towers over w itself at
sub-individual densities, so the leaked values would get amplified into a
spurious support front ratcheting toward the boundary. Below one individual
per cell the Gaussian noise model has no physical content; the floor
restores the compact support the exact dynamics possesses, and the support
edge then rides near the familiar log(N) mark ahead of the front.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import FrontConstants
from .errors import (
    ConfigRejectedError,
    DomainError,
    FarFromManifoldError,
    InstabilityError,
    ParameterError,
    StatisticsError,
)
from .grids import Field, Grid1D
from .manifold import drift_banded_matrix, fermi_eta, imex_drift_step
from .profile import WaveProfile
from .reaction import ReactionTerm, cubic_term
from .weighted import _trapz_uniform

_SUPPORT_SNAP = 1e-12
# a replicate is flagged once either interface edge comes this close to the
# boundary; the held Dirichlet rows distort the dynamics there
_EDGE_MARGIN = 2.0
_BOOT_RESAMPLES = 400
_REJECT_LIMIT = 100


@dataclass(frozen=True)
class SpdeConfig:
    """Run parameters for one ensemble.

    N is the population-density parameter; math.inf switches the noise off
    entirely (deterministic flow mode). T and cadence are on the w-clock;
    statistics are reported on the slow clock t = T/N.
    """

    N: float
    alpha: float
    grid: Grid1D
    dt: float = 1e-2
    T: float = 1e3
    replicates: int = 100
    seed: int = 0
    clip_mode: str = "clip"
    cadence: float = 1.0
    c_cut: float = 0.05
    c_integ: float = 0.25
    C_X: float = 1.0
    dist_guard: float = 0.5
    threads: int = 1

    def __post_init__(self) -> None:
        if not self.N > 0.0:
            raise ParameterError(f"N must be positive, got {self.N}")
        if not (0.0 <= self.alpha < 2.0):
            raise ParameterError(f"alpha must lie in [0, 2), got {self.alpha}")
        if not (self.dt > 0.0 and self.T > 0.0 and self.cadence > 0.0):
            raise ParameterError("dt, T and cadence must be positive")
        # explicit reaction stability: |f'| <= 1 + alpha on [0, 1]
        if self.dt * (1.0 + self.alpha) > 0.5:
            raise ParameterError(f"dt = {self.dt} too large for the explicit reaction at alpha = {self.alpha}")
        if self.clip_mode not in ("clip", "reflect-reject"):
            raise ParameterError(f"unknown clip_mode {self.clip_mode!r}")
        steps = round(self.cadence / self.dt)
        if steps < 1 or abs(steps * self.dt - self.cadence) > 1e-9 * self.cadence:
            raise ParameterError("cadence must be an integer multiple of dt")
        recs = round(self.T / self.cadence)
        if recs < 1 or abs(recs * self.cadence - self.T) > 1e-9 * self.T:
            raise ParameterError("T must be an integer multiple of the cadence")
        if self.replicates < 1:
            raise ParameterError("need at least one replicate")
        if not (0.0 < self.c_cut < 1.0 and 0.0 < self.c_integ < 1.0):
            raise ParameterError("c_cut and c_integ must lie in (0, 1)")
        if self.C_X <= 0.0 or self.dist_guard <= 0.0:
            raise ParameterError("C_X and dist_guard must be positive")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")
        if math.isfinite(self.N):
            cut = (1.0 + self.c_cut) * math.log(self.N)
            if cut + 1.0 > self.grid.x_max - 1.0:
                raise DomainError(
                    f"initial cut at x = {cut:.2f} does not fit inside "
                    f"[{self.grid.x_min}, {self.grid.x_max}] with room to spare"
                )

    @property
    def steps_per_record(self) -> int:
        return round(self.cadence / self.dt)

    @property
    def n_records(self) -> int:
        return round(self.T / self.cadence)


@dataclass
class FrontSeries:
    """Recorded front functionals of one replicate.

    times is on the w-clock. A non-empty flag means the replicate tripped a
    runtime guard; the arrays are truncated at the last valid record.
    """

    times: np.ndarray
    eta_series: np.ndarray
    R_series: np.ndarray
    rN_series: np.ndarray
    X_series: np.ndarray
    flag: str = ""
    replicate: int = -1


@dataclass(frozen=True)
class EnsembleStats:
    n_replicates: int
    horizon: float
    drift_hat: float
    drift_stderr: float
    var_slope_hat: float
    var_stderr: float
    mu: float
    sigma2: float
    z_drift: float
    z_var: float


# ---------------------------------------------------------------------------
# initial data


def _smoothstep(t: np.ndarray) -> np.ndarray:
    s = np.clip(t, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def build_initial_condition(profile: WaveProfile, config: SpdeConfig, eta0: float = 0.0) -> Field:
    """Profile shifted by eta0, cut to exact 0 / 1 plateaus at both ends.

    The right cut sits at (1 + c_cut) log N, the left one at
    -min(N, |x_min|/2); each cut is bridged by a C^1 ramp of width 1. With
    eta0 <= c_cut log N the result obeys the node-wise right-tail bound
    u0(x) <= N^c_cut exp(-(1 - c_cut) x) on x >= 0.

    Noise off (N = inf) the right cut sits where the profile tail meets the
    stepper's support floor: that is the compact support the floored flow
    maintains on its own, so the interface stays put instead of drifting into
    the edge guard.
    """
    grid = config.grid
    x = grid.x
    if math.isfinite(config.N):
        right_cut = (1.0 + config.c_cut) * math.log(config.N)
        if eta0 > config.c_cut * math.log(config.N) + 1e-12:
            raise ParameterError(f"eta0 = {eta0:.3g} breaks the right-tail bound; move the cut or shrink eta0")
    else:
        right_cut = eta0 + math.log(1.0 / _SUPPORT_SNAP) / profile.lambda_plus
    if right_cut + 1.0 > grid.x_max - 1.0:
        raise DomainError(f"right cut at {right_cut:.2f} leaves no room before x_max = {grid.x_max}")
    left_cut = -min(config.N, abs(grid.x_min) / 2.0)
    if left_cut - 1.0 <= grid.x_min:
        raise DomainError(f"left cut at {left_cut:.2f} leaves no room after x_min = {grid.x_min}")

    vals = profile.m_at(x - eta0)
    vals = 1.0 + (vals - 1.0) * _smoothstep(x - left_cut)
    vals = vals * _smoothstep(right_cut - x)
    np.clip(vals, 0.0, 1.0, out=vals)
    return Field(grid, vals)


# ---------------------------------------------------------------------------
# stepping


def _step_values(vals: np.ndarray, ab: np.ndarray, config: SpdeConfig, term: ReactionTerm, rng) -> np.ndarray:
    out = imex_drift_step(vals, ab, config.dt, term)
    if math.isfinite(config.N):
        drift = out
        var_loc = vals * (1.0 - vals)
        np.maximum(var_loc, 0.0, out=var_loc)
        amp = np.sqrt(var_loc * (config.dt / (config.grid.h * config.N)))
        out = drift + amp * rng.standard_normal(vals.size)

        bad = (out < -0.5) | (out > 1.5)
        if np.any(bad):
            raise InstabilityError(f"{int(bad.sum())} nodes left [-0.5, 1.5] before clipping; reduce dt or raise N")

        if config.clip_mode == "reflect-reject":
            viol = np.nonzero((out < 0.0) | (out > 1.0))[0]
            for _ in range(_REJECT_LIMIT):
                if viol.size == 0:
                    break
                out[viol] = drift[viol] + amp[viol] * rng.standard_normal(viol.size)
                keep = (out[viol] < 0.0) | (out[viol] > 1.0)
                viol = viol[keep]
            # stubborn nodes (amplitude comparable to the distance to the wall)
            # fall through to the clip below

        np.clip(out, 0.0, 1.0, out=out)

    # extinction/saturation floor at half an individual per cell: the
    # Gaussian noise model is meaningless below 1/(N h), and without the
    # floor its sqrt(w) kicks amplify the implicit solve's leakage into a
    # support front that ratchets to the boundary. Noise off the floor
    # still runs at the snap level, so support stays compact and the
    # exact-zero front marker keeps meaning; that is the only deviation
    # from the deterministic flow, and it is below round-off of O(1) data.
    tau = max(0.5 / (config.N * config.grid.h), _SUPPORT_SNAP)
    out[out < tau] = 0.0
    out[out > 1.0 - tau] = 1.0
    return out


def spde_step(w: Field, config: SpdeConfig, rng, term: ReactionTerm | None = None, ab: np.ndarray | None = None) -> Field:
    """One IMEX step with demographic noise; w must lie in [0, 1] node-wise.

    term and ab are derived from config when omitted; run_replicate passes
    cached ones. Raises InstabilityError when pre-clip values leave
    [-0.5, 1.5], the signature of a too-large dt.
    """
    if np.any(w.values < 0.0) or np.any(w.values > 1.0):
        raise ParameterError("input field leaves [0, 1]")
    if term is None:
        term = cubic_term(config.alpha)
    if ab is None:
        ab = drift_banded_matrix(w.grid, config.alpha, config.dt)
    return Field(w.grid, _step_values(w.values, ab, config, term, rng))


# ---------------------------------------------------------------------------
# front trackers


def track_R(w: Field) -> float:
    """Position of the rightmost node with a strictly positive value.

    Exact zeros are meaningful here: the stepper extinguishes sub-individual
    densities, so the support edge is sharp. Returns -inf for the all-zero
    field.
    """
    pos = np.nonzero(w.values > 0.0)[0]
    if pos.size == 0:
        return float("-inf")
    return float(w.grid.x[pos[-1]])


def _left_plateau_edge(w: Field) -> float:
    """Leftmost node strictly below 1, the mirror of track_R; +inf if none."""
    below = np.nonzero(w.values < 1.0)[0]
    if below.size == 0:
        return float("inf")
    return float(w.grid.x[below[0]])


def track_rN(w: Field, N: float, c_integ: float, C_X: float = 1.0) -> float:
    """Exponential front marker r with N * integral(w e^{(1-c)(x-r)}) = C_X.

    Monotone reparameterization of the weighted mass, computed in closed
    form: r = log(N I / C_X) / (1 - c). Returns -inf when the weighted
    integral vanishes.
    """
    gamma = 1.0 - c_integ
    weighted = w.values * np.exp(gamma * w.grid.x)
    integral = _trapz_uniform(weighted, w.grid.h)
    if integral <= 0.0:
        return float("-inf")
    return math.log(N * integral / C_X) / gamma


# ---------------------------------------------------------------------------
# replicates


def run_replicate(config: SpdeConfig, profile: WaveProfile, term: ReactionTerm, rng_stream) -> FrontSeries:
    """Step one replicate to the horizon, recording front functionals.

    Records eta (warm-started Newton), R, r_N and the raw weighted mass
    N*I at the configured cadence. Three guards abort a replicate cleanly,
    truncating its series and setting flag: the shift decomposition failing
    or drifting too far from the profile family ("fermi"), either interface
    edge approaching the boundary ("interface"), and a pre-clip range
    violation ("instability").
    """
    grid = config.grid
    n_rec = config.n_records
    steps = config.steps_per_record

    w = build_initial_condition(profile, config, eta0=0.0).values
    ab = drift_banded_matrix(grid, config.alpha, config.dt)

    times = config.cadence * np.arange(n_rec + 1)
    eta = np.full(n_rec + 1, np.nan)
    R = np.full(n_rec + 1, np.nan)
    rN = np.full(n_rec + 1, np.nan)
    X = np.full(n_rec + 1, np.nan)

    flag = ""
    eta_prev = 0.0
    last = -1
    for k in range(n_rec + 1):
        if k > 0:
            try:
                for _ in range(steps):
                    w = _step_values(w, ab, config, term, rng_stream)
            except InstabilityError:
                flag = "instability"
                break
        snapshot = Field(grid, w)
        R[k] = track_R(snapshot)
        rN[k] = track_rN(snapshot, config.N, config.c_integ, config.C_X)
        gamma = 1.0 - config.c_integ
        X[k] = config.N * _trapz_uniform(w * np.exp(gamma * grid.x), grid.h)
        try:
            dec = fermi_eta(snapshot, profile, eta0=eta_prev)
        except FarFromManifoldError:
            flag = "fermi"
            break
        if dec.dist > config.dist_guard:
            flag = "fermi"
            break
        eta[k] = dec.eta
        eta_prev = dec.eta
        last = k
        if R[k] >= grid.x_max - _EDGE_MARGIN or _left_plateau_edge(snapshot) <= grid.x_min + _EDGE_MARGIN:
            flag = "interface"
            break

    end = last + 1
    return FrontSeries(
        times=times[:end],
        eta_series=eta[:end],
        R_series=R[:end],
        rN_series=rN[:end],
        X_series=X[:end],
        flag=flag,
    )


def run_ensemble(config: SpdeConfig, profile: WaveProfile, term: ReactionTerm | None = None) -> list[FrontSeries]:
    """All replicates of the configuration, in replicate order.

    Replicate k owns the generator seeded by SeedSequence((seed, k)), so
    enlarging the ensemble never perturbs existing members. Replicates are
    independent; threads > 1 runs them on a pool (the banded solves release
    the GIL). Raises ConfigRejectedError when more than 20% get flagged.
    """
    if term is None:
        term = cubic_term(config.alpha)

    def one(k: int) -> FrontSeries:
        rng = np.random.default_rng(np.random.SeedSequence((config.seed, k)))
        series = run_replicate(config, profile, term, rng)
        series.replicate = k
        return series

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            series_list = list(pool.map(one, range(config.replicates)))
    else:
        series_list = [one(k) for k in range(config.replicates)]

    flagged = [s for s in series_list if s.flag]
    if len(flagged) > 0.2 * config.replicates:
        counts: dict[str, int] = {}
        for s in flagged:
            counts[s.flag] = counts.get(s.flag, 0) + 1
        raise ConfigRejectedError(f"{len(flagged)}/{config.replicates} replicates tripped guards: {counts}")
    return series_list


# ---------------------------------------------------------------------------
# ensemble statistics


def _slope(t: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(t, y, 1)[0])


def _z(numerator: float, stderr: float) -> float:
    if stderr > 0.0:
        return numerator / stderr
    if abs(numerator) < 1e-12:
        return 0.0
    return math.copysign(math.inf, numerator)


def ensemble_statistics(series_list: list[FrontSeries], config: SpdeConfig, theory: FrontConstants) -> EnsembleStats:
    """Slopes of mean and variance of the shift against the slow clock.

    Uses the non-flagged replicates only (at least 50 of them). On the slow
    clock t = t_w/N the theory lines are -mu*t for the mean and sigma2*t
    for the variance; z-scores report (drift_hat + mu) and
    (var_slope_hat - sigma2) in bootstrap standard errors (replicate-level
    resampling). With the noise off the slow clock degenerates, so the
    w-clock is used as-is; slopes and stderrs then come out zero.
    """
    ok = [s for s in series_list if not s.flag]
    if len(ok) < 50:
        raise StatisticsError(f"only {len(ok)} clean replicates, need at least 50")
    t_w = ok[0].times
    for s in ok[1:]:
        if not np.array_equal(s.times, t_w):
            raise StatisticsError("clean replicates disagree on the recording grid")

    t = t_w / config.N if math.isfinite(config.N) else t_w.astype(float)
    eta_mat = np.vstack([s.eta_series for s in ok])
    deta = eta_mat - eta_mat[:, :1]

    mean_t = deta.mean(axis=0)
    var_t = deta.var(axis=0, ddof=1)
    drift_hat = _slope(t, mean_t)
    var_slope_hat = _slope(t, var_t)

    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0xB007)))
    n = len(ok)
    boot_drift = np.empty(_BOOT_RESAMPLES)
    boot_var = np.empty(_BOOT_RESAMPLES)
    for b in range(_BOOT_RESAMPLES):
        idx = rng.integers(0, n, size=n)
        sample = deta[idx]
        boot_drift[b] = _slope(t, sample.mean(axis=0))
        boot_var[b] = _slope(t, sample.var(axis=0, ddof=1))
    drift_stderr = float(boot_drift.std(ddof=1))
    var_stderr = float(boot_var.std(ddof=1))

    return EnsembleStats(
        n_replicates=n,
        horizon=float(t[-1]),
        drift_hat=drift_hat,
        drift_stderr=drift_stderr,
        var_slope_hat=var_slope_hat,
        var_stderr=var_stderr,
        mu=theory.mu,
        sigma2=theory.sigma2,
        z_drift=_z(drift_hat + theory.mu, drift_stderr),
        z_var=_z(var_slope_hat - theory.sigma2, var_stderr),
    )
