import sys
import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from slicereg.optimize import OptimizerConfig

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

coord = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
quat = st.tuples(coord, coord, coord, coord).map(np.array)


@pytest.fixture(scope="session")
def fast_cfg():
    """Reduced search budget for tests that only need consistent maxima."""
    return OptimizerConfig(sphere_grid=32, multistarts=4, refinement_iterations=200)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
