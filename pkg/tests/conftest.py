import numpy as np
import pytest

from hyperpsi.curve import random_curve
from hyperpsi.pipeline import build_context

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def g2_contexts():
    return {s: build_context(random_curve(s, 2)) for s in (1, 2, 3)}


@pytest.fixture(scope="session")
def ctx2(g2_contexts):
    return g2_contexts[1]


@pytest.fixture(scope="session")
def ctx1():
    return build_context(random_curve(1, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
