"""Per-criterion pass/fail summary for the acceptance suite."""
from collections import defaultdict

_criterion_of = {}
_outcomes = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _criterion_of[item.nodeid] = number
            _titles[number] = title


def pytest_runtest_logreport(report):
    number = _criterion_of.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _outcomes[number].append(report.passed and report.when == "call")


def pytest_terminal_summary(terminalreporter):
    if not _titles:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_titles):
        got = _outcomes.get(number, [])
        status = "PASS" if got and all(got) else ("NOT RUN" if not got else "FAIL")
        passed = sum(got)
        terminalreporter.write_line(f"criterion {number:2d} {status:4s} ({passed}/{len(got)} tests) {_titles[number]}")
