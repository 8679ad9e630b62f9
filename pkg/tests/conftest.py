"""Shared fixtures and the per-criterion pass/fail summary."""
from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    ok = report.passed if report.when == "call" else not report.failed
    prev = _criteria.get(number, (title, True))
    _criteria[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"AC{number:<2} {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(scope="session")
def secretary():
    from sldcheck.concepts import gen_secretary

    return gen_secretary()


@pytest.fixture(scope="session")
def negotiation():
    from sldcheck.concepts import gen_negotiation

    return gen_negotiation()
