from collections import defaultdict

import pytest

CRITERIA = {
    1: "hypersphere criticality",
    2: "Clifford tori",
    3: "constant solutions",
    4: "cylinder conformal maps",
    5: "space-form assembly",
    6: "conformal-metric ODEs",
    7: "index and nullity",
    8: "condition (C) family",
    9: "variational consistency",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes[crit].append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        runs = _outcomes.get(n)
        if not runs:
            status = "NOT RUN"
        else:
            bad = [nid for nid, o in runs if o != "passed"]
            status = "PASS" if not bad else f"FAIL ({len(bad)}/{len(runs)} tests failed)"
        terminalreporter.write_line(f"criterion {n} ({CRITERIA[n]}): {status}")
