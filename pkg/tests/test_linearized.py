"""Linearized operator, semigroup kernels, and the dual-diffusion cross-check."""

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from pushedfronts import (
    Field,
    ParameterError,
    analytic_profile,
    build_operator,
    cubic_term,
    duality_cross_check,
    inner_alpha,
    kernel_columns,
    kernel_dt_factor,
    kernel_h_factor,
    op_dt_default,
    propagate,
    semigroup_compose_check,
    spectral_gap,
    zero_mode,
)


def test_self_adjoint_in_weighted_pairing(grid_fine, op075):
    rng = np.random.default_rng(np.random.SeedSequence((0, 0xC0DE)))
    x = grid_fine.x
    envelope = np.exp(-0.05 * x * x)
    u = Field(grid_fine, rng.standard_normal(grid_fine.n) * envelope)
    v = Field(grid_fine, rng.standard_normal(grid_fine.n) * envelope)
    left = inner_alpha(op075.apply(u), v, 0.75)
    right = inner_alpha(u, op075.apply(v), 0.75)
    scale = max(abs(left), abs(right), 1.0)
    assert abs(left - right) / scale < 1e-12


def test_zero_mode_annihilated_second_order(term025):
    # residual of A(dm) is pure discretization error: O(h^2), factor ~4 per halving
    from pushedfronts import Grid1D

    res = {}
    for h in (0.02, 0.01):
        grid = Grid1D.from_bounds(-40.0, 40.0, h)
        prof = analytic_profile(0.25, grid)
        op = build_operator(prof, term025, eta=0.0)
        q = op.to_sym(zero_mode(prof).values)
        res[h] = np.max(np.abs(op.apply_sym(q))) / np.max(np.abs(q))
    assert res[0.02] < 10.0 * 0.02**2
    assert 3.5 < res[0.02] / res[0.01] < 4.5


def test_gap_matches_closed_form_bound_state(op025, prof025):
    # below the edge-state threshold the first excited level is explicit:
    # (3/4)(1 - alpha^2) at alpha = 0.25 gives 0.703125
    gap = spectral_gap(op025, zero_mode(prof025))
    assert gap == pytest.approx(0.703125, abs=1e-4)


def test_gap_against_dense_spectral_oracle(op025):
    # independent oracle: full tridiagonal eigensolve of the same matrix
    n = op025.grid.n
    evals = eigh_tridiagonal(
        op025.d, np.full(n - 1, op025.e), select="i", select_range=(0, 1)
    )[0]
    gap_oracle = float(evals[1] - 0.0)  # ground level is the (near-)zero mode
    assert abs(evals[0]) < 1e-4
    gap = spectral_gap(op025, zero_mode(analytic_profile(0.25, op025.grid)))
    assert gap == pytest.approx(gap_oracle, rel=1e-9)


def test_gap_shift_independent_in_localized_regime(grid_fine, term025, prof025):
    g0 = spectral_gap(build_operator(prof025, term025, eta=0.0), zero_mode(prof025, 0.0))
    g3 = spectral_gap(build_operator(prof025, term025, eta=3.0), zero_mode(prof025, 3.0))
    assert abs(g3 - g0) / g0 < 1e-6


def test_semigroup_composition(op075):
    assert semigroup_compose_check(op075, 0.25, 0.25, 1e-3) < 1e-6
    # t2 = 0 exercises the identity pairing and the source normalization
    assert semigroup_compose_check(op075, 0.5, 0.0, 1e-3) < 1e-6


def test_kernel_dt_richardson(op075):
    factor, defect = kernel_dt_factor(op075, 0.25, 2e-3)
    assert 3.5 < factor < 4.5
    assert defect < 1e-4


def test_kernel_h_richardson(term075):
    from pushedfronts import Grid1D

    profiles = [
        analytic_profile(0.75, Grid1D.from_bounds(-40.0, 40.0, 0.02 / f)) for f in (1, 2, 4)
    ]
    factor, defect = kernel_h_factor(profiles, term075, 0.25, 1e-3)
    assert 3.0 < factor < 5.0
    assert defect < 1e-4


def test_kernel_positivity(op075, grid_fine):
    state = kernel_columns(op075, 0.25, 1e-3, [grid_fine.index_of(0.0)])
    assert state.min_value() >= -1e-10


def test_kernel_pairing_propagates_fields(op075, grid_fine):
    # pairing the kernel columns against g reproduces the semigroup applied
    # to g at the source points (the defining duality of the columns)
    x = grid_fine.x
    g = Field(grid_fine, np.exp(-0.5 * (x - 0.5) ** 2))
    t, dt = 0.5, 1e-3
    evolved = propagate(op075, g, t, dt)
    probes = [grid_fine.index_of(xp) for xp in (-1.0, 0.0, 1.5)]
    state = kernel_columns(op075, t, dt, probes)
    h = grid_fine.h
    w = np.full(grid_fine.n, h)
    w[0] = w[-1] = 0.5 * h
    weight = np.exp(0.75 * x)
    for j, idx in enumerate(probes):
        paired = float(np.sum(w * state.columns[:, j] * g.values * weight))
        assert paired == pytest.approx(evolved.values[idx], rel=1e-9, abs=1e-12)


def test_orthogonal_complement_decays_at_gap_rate(op025, prof025, grid_fine):
    gap = spectral_gap(op025, zero_mode(prof025))
    x = grid_fine.x
    q0 = op025.to_sym(zero_mode(prof025).values)
    psi = np.exp(-0.125 * x * x) * x
    psi -= (q0 @ psi) / (q0 @ q0) * q0
    start = Field(grid_fine, op025.from_sym(psi))
    n_half = np.linalg.norm(op025.to_sym(propagate(op025, start, 0.5, 1e-3).values))
    n_one = np.linalg.norm(op025.to_sym(propagate(op025, start, 1.0, 1e-3).values))
    rate = np.log(n_half / n_one) / 0.5
    assert rate > 0.95 * gap


def test_duality_monte_carlo(op075, prof075):
    pde, mc, stderr = duality_cross_check(op075, prof075, -1.0, 0.5, 1.0, 20_000, rng_seed=0)
    assert abs(pde - mc) <= 3.0 * stderr
    assert stderr > 0.0


def test_duality_reversibility(op075, prof075):
    # the transformed MC value is symmetric under swapping source and target
    # exactly when the dual diffusion satisfies detailed balance
    f_xy = duality_cross_check(op075, prof075, -1.0, 0.5, 1.0, 20_000, rng_seed=7)
    f_yx = duality_cross_check(op075, prof075, 0.5, -1.0, 1.0, 20_000, rng_seed=8)
    band = 3.0 * np.hypot(f_xy[2], f_yx[2])
    assert abs(f_xy[1] - f_yx[1]) <= band


def test_duality_guards(op075, prof075):
    with pytest.raises(ParameterError):
        duality_cross_check(op075, prof075, -1.0, 0.5, 0.1, 20_000, rng_seed=0)
    with pytest.raises(ParameterError):
        duality_cross_check(op075, prof075, -1.0, 0.5, 1.0, 100, rng_seed=0)


def test_kernel_time_validation(op075):
    with pytest.raises(ParameterError):
        kernel_columns(op075, 0.0, 1e-3, [0])


def test_default_step_tracks_grid(op075):
    assert op_dt_default(op075) == pytest.approx(min(1e-3, 0.02**2 / 0.4))
