import time
from collections import defaultdict

import pytest

from histpack.histogram import bundled_histogram
from histpack.nnls_packer import nnlshp

_outcomes = defaultdict(list)
_titles = {}


@pytest.fixture(scope="session")
def bundled_nnlshp():
    """NNLSHP depth 3 on the bundled histogram, solved once per session."""
    hist = bundled_histogram()
    start = time.perf_counter()
    solution, report = nnlshp(hist, 3)
    return hist, solution, report, time.perf_counter() - start


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, title = marker.args
            _titles[number] = title
            item.user_properties.append(("criterion", number))


def pytest_runtest_logreport(report):
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[number].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_titles):
        results = _outcomes.get(number, [])
        if not results:
            verdict = "NOT RUN"
        elif "failed" in results:
            verdict = "FAIL"
        else:
            verdict = "PASS"
            skipped = results.count("skipped")
            if skipped:
                verdict += f" ({skipped} optional check skipped)"
        terminalreporter.write_line(f"criterion {number}: {verdict} - {_titles[number]}")
