"""Echo the acceptance-criterion verdict lines after the test run.

pytest captures stdout by default, so the one-line PASS/FAIL verdicts that
test_acceptance prints are only visible live with `-s`; this hook repeats
them in the terminal summary of every run that exercised the gate.
"""

import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    verdicts = getattr(mod, "VERDICTS", None) if mod else None
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)
