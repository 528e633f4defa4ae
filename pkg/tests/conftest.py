import pytest

ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the summary at the end of the run lists them all."""

    def record(number, name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {name}" + (f" ({detail})" if detail else "")
        ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
