import pytest

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record the verdict of one acceptance criterion for the summary."""

    def record(number: int, title: str):
        _CRITERIA[number] = (title, False, request.node.nodeid)
        return number

    yield record
    rep = getattr(request.node, "rep_call", None)
    for number, (title, _, nodeid) in list(_CRITERIA.items()):
        if nodeid == request.node.nodeid:
            _CRITERIA[number] = (title, bool(rep and rep.passed), nodeid)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok, _ = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
