"""Front-fluctuation constants: Beta-function oracles and the kernel integral."""

import math
import warnings

import numpy as np
import pytest

from pushedfronts import (
    FrontConstants,
    ParameterError,
    analytic_profile,
    betaln,
    compute_A1,
    compute_A2,
    compute_mu_sigma,
    cubic_term,
)


def beta(a, b):
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def test_betaln_matches_lgamma():
    for a, b in [(1.0, 1.0), (2.5, 0.7), (0.1, 3.9), (5.0, 5.0)]:
        assert betaln(a, b) == pytest.approx(
            math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b), abs=1e-13
        )


def test_A1_exact_endpoints(grid_fine):
    # hand-derived rational values:
    # alpha=0: B(3,3)/B(2,2)^2 = (1/30)/(1/36) = 1.2
    # alpha=1: B(1,5)/B(1,3)^2 = (1/5)*9 = 1.8
    quad0, closed0 = compute_A1(analytic_profile(0.0, grid_fine), 0.0)
    assert closed0 == pytest.approx(1.2, abs=1e-12)
    assert quad0 == pytest.approx(1.2, abs=1e-6)
    quad1, closed1 = compute_A1(analytic_profile(1.0, grid_fine), 1.0)
    assert closed1 == pytest.approx(1.8, abs=1e-12)
    assert quad1 == pytest.approx(1.8, abs=1e-6)


def test_A1_quadrature_matches_closed_form_on_sweep(sweep_rows):
    for row in sweep_rows:
        assert row.status == "ok"
        assert abs(row.A1 - row.A1_closed) / row.A1_closed < 1e-6
        expected = beta(3 - 2 * row.alpha, 3 + 2 * row.alpha) / beta(
            2 - row.alpha, 2 + row.alpha
        ) ** 2
        assert row.A1_closed == pytest.approx(expected, rel=1e-12)


def test_A1_strictly_increasing(sweep_rows):
    a1 = [row.A1 for row in sweep_rows]
    assert all(b > a for a, b in zip(a1, a1[1:]))


def test_sigma2_equals_A1(sweep_rows):
    for row in sweep_rows:
        assert row.sigma2 == row.A1


def test_mu_combination(sweep_rows):
    for row in sweep_rows:
        assert row.mu == pytest.approx(0.25 * row.alpha * row.A1 + 0.5 * row.A2, abs=1e-14)


def test_mu_vanishes_toward_symmetric_point(sweep_rows):
    by_alpha = {round(r.alpha, 10): r.mu for r in sweep_rows}
    low = [by_alpha[a] for a in (0.1, 0.2, 0.3, 0.4)]
    # the drift shrinks monotonically as the asymmetry is turned off
    assert abs(low[0]) < abs(low[1]) < abs(low[2]) < abs(low[3])


def test_mu_positive_diagnostic(sweep_rows):
    # qualitative expectation, reported as a warning rather than enforced
    bad = [r.alpha for r in sweep_rows if r.alpha >= 0.2 and r.mu <= 0.0]
    if bad:
        warnings.warn(f"drift coefficient not positive at alpha={bad}", stacklevel=1)


def test_A2_vanishes_at_symmetric_point(a2_zero):
    assert abs(a2_zero["A2"]) < 1e-3
    assert abs(a2_zero["A2_route2"]) < 1e-3


def test_A2_route_equivalence(sweep_rows):
    for target in (0.5, 1.0):
        row = next(r for r in sweep_rows if abs(r.alpha - target) < 1e-9)
        assert row.err_quad / abs(row.A2) < 0.01


def test_A2_stable_under_joint_halving(sweep_rows, a2_half_resolution):
    base = next(r for r in sweep_rows if abs(r.alpha - 0.75) < 1e-9).A2
    assert abs(a2_half_resolution - base) / abs(base) < 0.01


def test_truncation_error_reported_small(sweep_rows):
    for row in sweep_rows:
        assert row.err_trunc < 1e-3 * abs(row.A2) + 1e-12


def test_compute_A2_guards(grid_fine):
    prof = analytic_profile(0.75, grid_fine)
    with pytest.raises(ParameterError):
        compute_A2(prof, cubic_term(0.5), 0.5, dt=1e-3)  # profile built at 0.75
    with pytest.raises(ParameterError):
        compute_A2(prof, cubic_term(0.75), 0.75, trunc_T=0.5)


def test_compute_mu_sigma_formula():
    row = FrontConstants(
        alpha=0.6, A1=1.31, A1_closed=1.31, A2=-0.2, mu=float("nan"),
        sigma2=float("nan"), trunc_T=30.0, h=0.02, x_min=-40.0, x_max=40.0, dt=1e-3,
    )
    out = compute_mu_sigma(row)
    assert out.sigma2 == 1.31
    assert out.mu == pytest.approx(0.25 * 0.6 * 1.31 - 0.1, abs=1e-14)
