"""Shared acceptance reporting: criterion tests register one PASS/FAIL
line each, echoed both inline and in the terminal summary."""

import pytest

_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record and print a single acceptance line for one criterion."""

    def record(label: str, passed: bool, detail: str) -> str:
        line = f"{'PASS' if passed else 'FAIL'} {label}: {detail}"
        _LINES.append(line)
        print(line)
        return line

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
