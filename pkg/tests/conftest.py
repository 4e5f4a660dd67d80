import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """report(ok, label, detail): record one PASS/FAIL line for the terminal summary."""
    def report(ok: bool, label: str, detail: str) -> bool:
        _LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
