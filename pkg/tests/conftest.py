_acceptance_lines = []


def record_criterion(line: str) -> None:
    """Collect one pass/fail line per acceptance criterion for the summary."""
    _acceptance_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
