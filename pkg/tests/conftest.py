import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# one verdict line per acceptance criterion, shown after the run
VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
