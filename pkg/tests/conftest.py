import pytest

from decoysynth.fixtures import build_toy_ab

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def toy():
    return build_toy_ab()


@pytest.fixture
def record_acceptance():
    """Callable recording one acceptance line; the summary prints them all."""
    def record(number, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        print(ACCEPTANCE_LINES[-1])
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
