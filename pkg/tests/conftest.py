"""Shared fixtures.

The expensive session fixtures (constants sweep, SPDE ensembles) are built
once and shared between the unit tests and the acceptance suite; everything
downstream of a fixed seed is deterministic, so sharing does not couple test
outcomes, it only avoids recomputing multi-minute pipelines.
"""

import numpy as np
import pytest

from pushedfronts import (
    Grid1D,
    SpdeConfig,
    SweepConfig,
    analytic_profile,
    build_operator,
    compute_A2,
    cubic_term,
    run_ensemble,
    sweep,
)

# one line per acceptance criterion, printed by pytest_terminal_summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid_fine():
    return Grid1D.from_bounds(-40.0, 40.0, 0.02)


@pytest.fixture(scope="session")
def term075():
    return cubic_term(0.75)


@pytest.fixture(scope="session")
def prof075(grid_fine):
    return analytic_profile(0.75, grid_fine)


@pytest.fixture(scope="session")
def op075(prof075, term075):
    return build_operator(prof075, term075, eta=0.0)


@pytest.fixture(scope="session")
def term025():
    return cubic_term(0.25)


@pytest.fixture(scope="session")
def prof025(grid_fine):
    return analytic_profile(0.25, grid_fine)


@pytest.fixture(scope="session")
def op025(prof025, term025):
    return build_operator(prof025, term025, eta=0.0)


@pytest.fixture(scope="session")
def sweep_rows():
    """The 14-point reaction-strength sweep at default resolution (minutes).

    The kernel-squared integrand decays like the spectral gap, which closes
    toward the regime boundary; the last two points need a longer horizon
    to meet the truncation budget.
    """
    alphas = [round(0.1 * k, 10) for k in range(1, 13)]
    alphas.insert(7, 0.75)  # the resolution-halving check compares against this row
    rows = sweep(alphas, SweepConfig())
    rows += sweep([1.3, 1.4], SweepConfig(trunc_T=80.0))
    return rows


@pytest.fixture(scope="session")
def a2_zero(grid_fine):
    """Kernel-squared integral detail dict at the symmetric point alpha=0."""
    term = cubic_term(0.0)
    prof = analytic_profile(0.0, grid_fine)
    return compute_A2(prof, term, 0.0, return_detail=True)


@pytest.fixture(scope="session")
def a2_half_resolution():
    """A2 at alpha=0.75 with h and dt jointly halved (base sits in the sweep)."""
    term = cubic_term(0.75)
    return compute_A2(
        analytic_profile(0.75, Grid1D.from_bounds(-40.0, 40.0, 0.01)), term, 0.75, dt=5e-4
    )


def _ensemble(alpha):
    grid = Grid1D.from_bounds(-60.0, 60.0, 0.25)
    config = SpdeConfig(
        N=1e3, alpha=alpha, grid=grid, dt=1e-2, T=1000.0, replicates=100, seed=0
    )
    series = run_ensemble(config, analytic_profile(alpha, grid))
    return config, series


@pytest.fixture(scope="session")
def ensemble075():
    """100 noisy replicates at alpha=0.75, N=1e3, to the desk-scale horizon."""
    return _ensemble(0.75)


@pytest.fixture(scope="session")
def ensemble0():
    """100 noisy replicates at the symmetric point alpha=0."""
    return _ensemble(0.0)
