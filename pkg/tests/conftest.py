import numpy as np
import pytest
from hypothesis import settings

from nclab.catalog import chiral_point_triple, matrix_even_triple, two_point_triple

settings.register_profile("nclab", deadline=None, max_examples=40)
settings.load_profile("nclab")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def base():
    return matrix_even_triple(2, 7)


@pytest.fixture(scope="session")
def two_point():
    return two_point_triple()


@pytest.fixture(scope="session")
def chiral():
    return chiral_point_triple()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    RESULTS = getattr(mod, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
