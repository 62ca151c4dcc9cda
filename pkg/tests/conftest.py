import pytest

from complexwalk.spectral import cosine
from complexwalk.step import ModelParams


@pytest.fixture
def cos_datum():
    return cosine()


@pytest.fixture
def p4_damped():
    return ModelParams(4, -1.0)


@pytest.fixture
def p3():
    return ModelParams(3, 1.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
