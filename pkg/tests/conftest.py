import pytest

_ACCEPTANCE = []


@pytest.fixture
def record():
    """Collect one PASS/FAIL line per acceptance criterion."""
    def _record(number, title, ok, detail):
        _ACCEPTANCE.append((number, title, ok, detail))
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}")
