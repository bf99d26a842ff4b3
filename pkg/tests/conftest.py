"""Collect acceptance-criterion outcomes and print one line per criterion."""

from collections import defaultdict

_outcomes: dict = defaultdict(list)
_titles: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _titles[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    n = report.user_properties and dict(report.user_properties).get("criterion")
    if n:
        _outcomes[n].append((report.outcome, report.duration))


def pytest_runtest_setup(item):
    m = item.get_closest_marker("criterion")
    if m:
        item.user_properties.append(("criterion", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_titles):
        runs = _outcomes.get(n, [])
        if not runs:
            status = "NOT RUN"
        elif all(o == "passed" for o, _ in runs):
            status = "PASS"
        else:
            status = "FAIL"
        secs = sum(d for _, d in runs)
        terminalreporter.write_line(f"criterion {n:2d}: {status:7} {secs:7.2f}s  {_titles[n]}")
