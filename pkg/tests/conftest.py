import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def line_projection(theta):
    """Projection onto the line spanned by ``(cos theta, sin theta)``."""
    v = np.array([np.cos(theta), np.sin(theta)])
    return np.outer(v, v)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record and print one pass/fail line, then assert it."""

    def report(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
