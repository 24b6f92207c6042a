"""Shared test plumbing: suite timer and acceptance result reporting."""

import time

# Captured at collection import time so the budget check at the end of the
# suite covers collection plus every test before it.
SESSION_T0 = time.monotonic()

# One line per acceptance check, echoed after the pytest summary so the
# pass/fail lines are visible without -s.
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    line = f"[ACCEPTANCE] {name}: {status}{suffix}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
