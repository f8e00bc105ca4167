# Collects outcomes of tests marked ``criterion`` and prints one line per
# acceptance criterion at the end of the run.
import pytest

_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    # setup, call and teardown all report; any failure marks the criterion
    _, failed = _results.get(number, (title, False))
    _results[number] = (title, failed or report.failed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, failed = _results[number]
        terminalreporter.write_line(f"criterion {number} ({title}): {'FAIL' if failed else 'PASS'}")
