"""Shared test plumbing: the acceptance-criteria summary block."""

CRITERION_LINES = []


def record_criterion(n: int, ok: bool, detail: str) -> bool:
    """Log one verdict line for criterion n; returns ok so callers can assert it.

    Called before the assert, so a failing criterion still shows its line.
    """
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERION_LINES.append((n, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(CRITERION_LINES):
        terminalreporter.write_line(line)
