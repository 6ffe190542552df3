import zlib

import numpy as np
import pytest

from photonkit import build_grid, default_grid
from photonkit.vacuum import CorrelationKernel


@pytest.fixture(scope="session")
def grid():
    return default_grid()


@pytest.fixture(scope="session")
def coarse_grid():
    return build_grid(1e-3, 8.0, (16, 10, 16))


@pytest.fixture(scope="session")
def kernel(grid):
    return CorrelationKernel(eta=2.0, grid=grid)


@pytest.fixture(scope="session")
def coarse_kernel(coarse_grid):
    return CorrelationKernel(eta=2.0, grid=coarse_grid)


@pytest.fixture
def rng(request):
    # one stream per test, independent of collection order
    return np.random.default_rng(zlib.crc32(request.node.name.encode()))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
