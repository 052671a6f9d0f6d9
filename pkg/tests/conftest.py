import numpy as np
import pytest

from hardylab.circle import CircleGrid, DiskScan
from hardylab.disk import DiskQuadrature
from hardylab.symbols import symbol_matrix
from hardylab.weights import shipped_weights, weight_pairs


@pytest.fixture(scope="session")
def grid():
    return CircleGrid(4096, offset=True)


@pytest.fixture(scope="session")
def small_grid():
    return CircleGrid(1024, offset=True)


@pytest.fixture(scope="session")
def weights(grid):
    return shipped_weights(grid)


@pytest.fixture(scope="session")
def pairs(grid):
    return weight_pairs(grid)


@pytest.fixture(scope="session")
def symbols(grid):
    return symbol_matrix(grid, np.random.default_rng(0))


@pytest.fixture(scope="session")
def scan():
    return DiskScan()


@pytest.fixture(scope="session")
def quad():
    return DiskQuadrature()


@pytest.fixture(scope="session")
def small_quad():
    return DiskQuadrature(64, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one pass/fail line per acceptance criterion in the terminal summary
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _CRITERIA[mark.args[0]] = (mark.args[1], "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
