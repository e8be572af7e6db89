import pytest

_LINES = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record a PASS/FAIL line for an acceptance criterion from the calling test."""
    lines = request.config.stash.setdefault(_LINES, {})

    def record(number, text):
        lines[number] = text

    yield record
    rep = getattr(request.node, "rep_call", None)
    for number, text in list(lines.items()):
        if text and not text.startswith(("PASS", "FAIL")):
            ok = rep is not None and rep.passed
            lines[number] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    rep = yield
    if rep.when == "call":
        item.rep_call = rep
    return rep


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
