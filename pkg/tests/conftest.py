"""Shared test wiring: the per-criterion verdict registry.

Acceptance tests record one verdict line each; the summary hook prints them
as a block at the end of the run so the pass/fail state of every headline
claim is visible at a glance.
"""

_CRITERION_LINES = []


def record_criterion(tag: str, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    _CRITERION_LINES.append(f"[{tag}] {verdict} - {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_CRITERION_LINES):
        terminalreporter.write_line(line)
