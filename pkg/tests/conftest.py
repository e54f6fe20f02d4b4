"""Shared test helpers plus the acceptance-criteria summary section."""

CRITERION_LINES = []


def record_criterion(line: str) -> None:
    """Queue one pass/fail line for the end-of-run summary."""
    CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
