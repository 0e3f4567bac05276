import numpy as np
import pytest

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def example_pair():
    return np.eye(2), np.diag([1.0, 2.0])


class _Criterion:
    def __init__(self):
        self.line = None

    def record(self, number, title, ok, detail=""):
        self.line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}  [{detail}]"
        print(self.line)
        _ACCEPTANCE.append((number, self.line))
        assert ok, self.line


@pytest.fixture
def criterion(request):
    c = _Criterion()
    yield c
    if c.line is None:
        line = f"FAIL  criterion ??: {request.node.name} raised before reporting"
        print(line)
        _ACCEPTANCE.append((99, line))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
