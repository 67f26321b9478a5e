import pytest

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])


@pytest.fixture
def record():
    def put(number: int, title: str, ok: bool, note: str):
        ACCEPTANCE[number] = f"criterion {number} {'PASS' if ok else 'FAIL'}  {title}: {note}"
        print(ACCEPTANCE[number])
    return put
