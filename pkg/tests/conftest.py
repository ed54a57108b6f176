import pytest

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def record():
    """Store one summary line per acceptance criterion."""

    def put(key: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES[key] = f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}"
        print(ACCEPTANCE_LINES[key])

    return put


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.rstrip("abcdefgh")), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
