"""Shared paths and the acceptance-line reporter."""

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDENS = Path(__file__).parent / "goldens"

# one line per acceptance criterion, printed by pytest_terminal_summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sweep_csv():
    return FIXTURES / "sweep.csv"


@pytest.fixture(scope="session")
def ensemble_csv():
    return FIXTURES / "ensemble.csv"


@pytest.fixture(scope="session")
def stats_csv():
    return FIXTURES / "ensemble_stats.csv"
