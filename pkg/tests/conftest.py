"""Shared test plumbing: acceptance-criterion result reporting.

Each acceptance test records one line; a terminal-summary hook replays
them at the end of the run so the verdicts stay visible even though
pytest captures stdout of passing tests.
"""

_criterion_lines: list[tuple[int, str]] = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    line = f"[criterion {number:2d}] {verdict}  {detail}"
    _criterion_lines.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)
