import re

_OUTCOMES = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not match:
        return
    key = int(match.group(1))
    if report.skipped:
        _OUTCOMES[key] = "SKIP"
    elif report.failed:
        _OUTCOMES[key] = "FAIL"
    elif report.when == "call" and key not in _OUTCOMES:
        _OUTCOMES[key] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_OUTCOMES):
        terminalreporter.write_line(f"ACCEPTANCE criterion {key}: {_OUTCOMES[key]}")
