"""Shared test plumbing: acceptance lines that survive output capture."""

from __future__ import annotations

ACCEPTANCE_LINES: list = []


def record_acceptance(line: str) -> None:
    """Queue a one-line verdict for the end-of-run acceptance section."""
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
