import time

import pytest
from hypothesis import HealthCheck, settings

from czjoint import bench

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def linear_batch(tmp_path_factory):
    """The shipped linear benchmark (10 seeds, 200 steps, four methods)."""
    out = tmp_path_factory.mktemp("linear")
    t0 = time.perf_counter()
    result = bench.run_linear_batch(bench.default_config("linear-batch"), out)
    return result, out, time.perf_counter() - t0


@pytest.fixture(scope="session")
def nonlinear_run(tmp_path_factory):
    """The shipped nonlinear example (150 steps, four methods)."""
    out = tmp_path_factory.mktemp("nonlinear")
    t0 = time.perf_counter()
    result = bench.run_nonlinear(bench.default_config("nonlinear"), out)
    return result, out, time.perf_counter() - t0
