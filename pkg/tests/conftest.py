"""Shared pytest plumbing: the acceptance verdict registry.

Verdict lines are emitted in the terminal summary so they survive output
capture and appear once per criterion at the end of every run.
"""

ACCEPTANCE_VERDICTS = []


def record_verdict(line: str) -> None:
    ACCEPTANCE_VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
