import pytest

ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body calls ``criterion(ok, detail)``."""
    def record(ok: bool, detail: str = ""):
        ACCEPTANCE.append((request.node.name, ok, detail))
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
