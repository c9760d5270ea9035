"""Collects acceptance outcomes and prints one line per criterion."""
import pytest

_OUTCOMES: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        _OUTCOMES.setdefault(marker.args[0], []).append((report.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        results = _OUTCOMES[number]
        status = "PASS" if all(ok for ok, _ in results) else "FAIL"
        details = " | ".join(d for _, d in results if d)
        terminalreporter.write_line(f"criterion {number}: {status} {details}".rstrip())
