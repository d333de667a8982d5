import re
import warnings

import numpy as np
import pytest

from bgpwave import Grid, ModelParams, SolverConfig, solve_coupled, solve_kpp

REF = dict(kappa=1.0, alpha=2.0, rho=10.0)


@pytest.fixture(scope="session")
def ref_grid():
    return Grid(40.0, 0.02)


@pytest.fixture(scope="session")
def ref_params():
    return ModelParams(**REF)


@pytest.fixture(scope="session")
def ref_kpp(ref_grid, ref_params):
    return solve_kpp(ref_grid, ref_params)


@pytest.fixture(scope="session")
def ref_solution(ref_grid, ref_params, ref_kpp):
    return solve_coupled(ref_grid, ref_params, SolverConfig(), kpp=ref_kpp)


@pytest.fixture
def small_grid():
    return Grid(10.0, 0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_regime_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(key, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {title}: {detail}"
        _ACCEPTANCE[key] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    def order(key):
        num, suffix = re.match(r"(\d+)(.*)", str(key)).groups()
        return int(num), suffix

    for key in sorted(_ACCEPTANCE, key=order):
        terminalreporter.write_line(_ACCEPTANCE[key])
