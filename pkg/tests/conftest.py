import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_results = {}
_details = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.fixture
def detail(request):
    """Attach a one-line summary to the running acceptance criterion."""
    marker = request.node.get_closest_marker("criterion")

    def note(text):
        if marker is not None:
            _details[marker.args[0]] = text

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    k = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        passed = report.outcome == "passed"
        _results[k] = _results.get(k, True) and passed
        if not passed and k not in _details and call.excinfo is not None:
            _details[k] = str(call.excinfo.value).splitlines()[0][:200]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_results):
        status = "PASS" if _results[k] else "FAIL"
        line = f"criterion {k:>2}: {status}"
        if k in _details:
            line += f"  ({_details[k]})"
        terminalreporter.write_line(line)
