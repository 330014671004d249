"""Reaction-term algebra against hand-computed values of the cubic family."""

import numpy as np
import pytest

from pushedfronts import (
    OutOfDomainError,
    ParameterError,
    UnsupportedReactionError,
    cubic_term,
    f_derivatives,
    f_eval,
    potential_F,
    tabulated_term,
    validate_pushed,
)


def test_cubic_point_values():
    # f(u) = u(1-u)(2u-1+alpha), worked by hand at rational points
    term = cubic_term(0.75)
    assert f_eval(term, 0.0) == 0.0
    assert f_eval(term, 1.0) == 0.0
    assert f_eval(term, 0.5) == pytest.approx(0.25 * 0.75, abs=1e-15)
    assert f_eval(term, 0.25) == pytest.approx(0.25 * 0.75 * (-0.5 + 0.75), abs=1e-15)


def test_cubic_endpoint_slopes():
    for alpha in (0.0, 0.4, 0.75, 1.25):
        term = cubic_term(alpha)
        fp0, _ = f_derivatives(term, 0.0)
        fp1, _ = f_derivatives(term, 1.0)
        assert fp0 == pytest.approx(alpha - 1.0, abs=1e-14)
        assert fp1 == pytest.approx(-(1.0 + alpha), abs=1e-14)


def test_derivatives_match_finite_differences():
    term = cubic_term(0.6)
    u = np.linspace(0.05, 0.95, 19)
    eps = 1e-6
    fp_fd = (f_eval(term, u + eps) - f_eval(term, u - eps)) / (2 * eps)
    fp, fpp = f_derivatives(term, u)
    assert np.max(np.abs(fp - fp_fd)) < 5e-9
    fpp_fd = (f_eval(term, u + eps) - 2 * f_eval(term, u) + f_eval(term, u - eps)) / eps**2
    assert np.max(np.abs(fpp - fpp_fd)) < 5e-4


def test_potential_normalization_and_slope():
    term = cubic_term(0.9)
    assert potential_F(term, 0.0) == 0.0
    # F(1) = -alpha/6, the energy difference between the two stable states
    assert potential_F(term, 1.0) == pytest.approx(-0.9 / 6.0, abs=1e-14)
    u = np.linspace(0.1, 0.9, 9)
    eps = 1e-6
    dF = (potential_F(term, u + eps) - potential_F(term, u - eps)) / (2 * eps)
    assert np.max(np.abs(dF + f_eval(term, u))) < 5e-9


def test_potential_symmetric_case_degenerate():
    # alpha = 0 balances the wells exactly
    assert potential_F(cubic_term(0.0), 1.0) == pytest.approx(0.0, abs=1e-15)


def test_regime_classification():
    assert validate_pushed(cubic_term(0.75)) == "fully_pushed"
    assert validate_pushed(cubic_term(1.49)) == "fully_pushed"
    assert validate_pushed(cubic_term(1.5)) == "semi_pushed"
    assert validate_pushed(cubic_term(2.3)) == "out_of_range"
    assert validate_pushed(cubic_term(0.0)) == "out_of_range"


def test_tabulated_round_trip():
    alpha = 0.75
    cub = cubic_term(alpha)
    u = np.linspace(-0.05, 1.05, 441)
    tab = tabulated_term(alpha, u, f_eval(cub, u), *f_derivatives(cub, u))
    probe = np.linspace(0.0, 1.0, 101)
    assert np.max(np.abs(f_eval(tab, probe) - f_eval(cub, probe))) < 1e-9
    fp_t, fpp_t = f_derivatives(tab, probe)
    fp_c, fpp_c = f_derivatives(cub, probe)
    assert np.max(np.abs(fp_t - fp_c)) < 1e-8
    assert np.max(np.abs(fpp_t - fpp_c)) < 1e-6


def test_tabulated_out_of_domain():
    u = np.linspace(0.0, 1.0, 11)
    z = np.zeros(11)
    tab = tabulated_term(0.5, u, z, z, z)
    with pytest.raises(OutOfDomainError):
        f_eval(tab, 1.2)
    with pytest.raises(UnsupportedReactionError):
        validate_pushed(tab)


def test_tabulated_rejects_bad_samples():
    with pytest.raises(ParameterError):
        tabulated_term(0.5, [0, 1, 1, 2], [0] * 4, [0] * 4, [0] * 4)
    with pytest.raises(ParameterError):
        tabulated_term(0.5, [0, 1, 2], [0] * 3, [0] * 3, [0] * 3)


def test_nonfinite_alpha_rejected():
    with pytest.raises(ParameterError):
        cubic_term(float("nan"))
