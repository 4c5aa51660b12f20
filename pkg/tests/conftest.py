"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_outcomes: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def detail(request):
    """Tests append human-readable facts here; they are shown in the summary line."""
    notes: list[str] = []
    request.node.user_properties.append(("detail", notes))
    return notes


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        if marker is not None and report.when == "setup" and report.failed:
            _outcomes[marker.args[0]] = (marker.args[1], "FAIL", "setup error")
        return
    notes = next((v for k, v in item.user_properties if k == "detail"), [])
    status = "PASS" if report.passed else "FAIL"
    _outcomes[marker.args[0]] = (marker.args[1], status, "; ".join(notes))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, status, notes = _outcomes[number]
        line = f"criterion {number} [{status}] {title}"
        if notes:
            line += f": {notes}"
        terminalreporter.write_line(line)
