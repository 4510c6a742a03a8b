import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.dirname(__file__))

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

# filled by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
