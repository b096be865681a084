import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA: dict = {}


def record(name: str, ok: bool, detail: str) -> None:
    """Remember a criterion verdict for the end-of-run summary and echo it."""
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    CRITERIA[name] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[name])
