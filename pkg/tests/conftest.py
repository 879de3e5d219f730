import pytest

from copesat.topology import build_component


@pytest.fixture(scope="session")
def cross5():
    return build_component("cross", 5)


@pytest.fixture(scope="session")
def x5():
    return build_component("x", 5)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
