from __future__ import annotations

import pytest

from sectioncert.numerics import surd_normalize

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def gamma0():
    return surd_normalize(4, 2, 14)


@pytest.fixture
def gamma1():
    return surd_normalize(40, 2, 94)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    state = {"detail": ""}

    def note(detail: str) -> None:
        state["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    label = request.node.get_closest_marker("criterion")
    name = label.args[0] if label else request.node.name
    line = f"{status} criterion {name}"
    if state["detail"]:
        line += f": {state['detail']}"
    ACCEPTANCE_LINES.append(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
