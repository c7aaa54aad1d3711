import time
from collections import OrderedDict

import pytest

SUITE_BUDGET_S = 60.0

_results: "OrderedDict[int, dict]" = OrderedDict()
_start = time.perf_counter()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    number = getattr(report, "criterion", None)
    if number is None:
        return
    entry = _results.setdefault(number[0], {"title": number[1], "passed": True, "tests": 0})
    entry["tests"] += 1
    entry["passed"] &= report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args


def _suite_ok() -> tuple[bool, float]:
    elapsed = time.perf_counter() - _start
    return elapsed < SUITE_BUDGET_S, elapsed


def pytest_sessionfinish(session, exitstatus):
    ok, _ = _suite_ok()
    if not ok and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, entry in sorted(_results.items()):
        verdict = "PASS" if entry["passed"] else "FAIL"
        tr.write_line(f"{verdict} criterion {number}: {entry['title']} ({entry['tests']} checks)")
    ok, elapsed = _suite_ok()
    tr.write_line(f"{'PASS' if ok else 'FAIL'} criterion 9: full suite under {SUITE_BUDGET_S:.0f} s "
                  f"({elapsed:.1f} s)")
