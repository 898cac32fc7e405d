import pytest

_LINES: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture
def criterion(request):
    """Report a criterion verdict: prints one line, records it for the summary, then asserts."""
    number = request.node.get_closest_marker("criterion").args[0]

    def report(ok: bool, detail: str, elapsed: float | None = None):
        timing = "" if elapsed is None else f" [{elapsed:.1f} s]"
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}{timing}"
        print(line)
        _LINES[number] = line
        assert ok, line

    return report


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call" and rep.failed and marker.args[0] not in _LINES:
        _LINES[marker.args[0]] = f"criterion {marker.args[0]:>2}: FAIL  raised {call.excinfo.typename}"


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_LINES):
            terminalreporter.write_line(_LINES[number])
