"""Collects acceptance-criterion status lines and prints them after the run.

Plain writes to stdout are swallowed by capture for passing tests, so the
acceptance tests record their one-line verdicts here instead.
"""

acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
