import sys

import mpmath
import pytest


@pytest.fixture
def mp():
    # an independent mpmath context for oracle values; never the package's own
    return mpmath.MPContext()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
