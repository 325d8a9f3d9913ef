from __future__ import annotations

import functools

import pytest

from shocklab.john import DataSpec, GeometricGrid, run
from shocklab.profiles import from_spec

# (criterion number, PASS/FAIL, detail), filled by test_acceptance.py
ACCEPTANCE_LINES: list[tuple[int, str, str]] = []

FAMILY_PROFILE = "-poly_bump:1,4,0.5"


def family_data(lam: float) -> DataSpec:
    """``Psi = 0``, ``d_t Psi = -lam poly_bump(1, 4)`` posed at ``t = -1/2``."""
    return DataSpec(from_spec("zero"), from_spec(FAMILY_PROFILE), 0.5, lam, -0.5)


@functools.lru_cache(maxsize=None)
def family_run(lam: float):
    return run(family_data(lam), GeometricGrid(U0=0.9, n_u=400), mu_stop=0.01)


@pytest.fixture(scope="session")
def family():
    return family_run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n, verdict, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {detail}")
