import sys

import pytest

from qdelaunay import make_params, solve_delaunay


@pytest.fixture(scope="session")
def p6():
    return make_params(6)


@pytest.fixture(scope="session")
def profiles(p6):
    """n = 6 profiles shared across modules, keyed by necksize."""
    return {e: solve_delaunay(p6, e) for e in (0.3, 0.5, 0.7)}


@pytest.fixture(scope="session")
def prof05(profiles):
    return profiles[0.5]


@pytest.fixture(scope="session")
def cyl6(p6):
    return solve_delaunay(p6, p6.eps_n)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("QDELAUNAY_CACHE", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for i in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.result_line(i))
