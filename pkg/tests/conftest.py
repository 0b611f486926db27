import pytest

_LINES = []


@pytest.fixture
def report():
    """Record a PASS/FAIL line for an acceptance criterion."""

    def emit(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        _LINES.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
