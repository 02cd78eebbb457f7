import pytest

from ._helpers import member


@pytest.fixture(scope="session")
def H11():
    return member(1.0, 1.0)


@pytest.fixture(scope="session")
def H01():
    """The rotational paraboloid H^0_1."""
    return member(1.0, 0.0)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
