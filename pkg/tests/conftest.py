import pytest

from froglab import _backend, analysis

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def constants():
    return analysis.model_constants()


@pytest.fixture(params=_backend.available())
def kernels(request):
    return _backend.load(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
