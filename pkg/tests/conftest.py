import sys


def pytest_terminal_summary(terminalreporter):
    rows = []
    for mod in list(sys.modules.values()):
        rows.extend(getattr(mod, "ACCEPTANCE_RESULTS", {}).items())
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, (ok, line) in sorted(rows):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {line}")
