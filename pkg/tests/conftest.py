import pytest

_RESULTS = []


@pytest.fixture
def criterion():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _RESULTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_RESULTS, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
