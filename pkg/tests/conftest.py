"""Shared pytest wiring: surfaces the acceptance gate lines.

The gate tests record one line per criterion; printing them from the
terminal-summary hook keeps them visible on a plain ``pytest -v`` run,
where ordinary prints from passing tests are captured and dropped.
"""

acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance gate")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
