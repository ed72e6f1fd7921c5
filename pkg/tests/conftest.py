import pytest

# criterion number -> (PASS/FAIL, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture
def report():
    def record(number: int, ok: bool, detail: str) -> None:
        prev = ACCEPTANCE.get(number)
        if prev is not None and prev[0] == "FAIL":
            return  # a failing clause sticks
        ACCEPTANCE[number] = ("PASS" if ok else "FAIL", detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
