import time
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
_LINES: list[str] = []


class Criterion:
    """Times one acceptance criterion and records a single PASS/FAIL line."""

    def __init__(self, number: int, title: str, budget_s: float):
        self.number, self.title, self.budget = number, title, budget_s
        self.notes: list[str] = []

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def note(self, text: str):
        self.notes.append(text)

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.budget
        why = "" if exc_type is None else f" [{exc_type.__name__}: {str(exc).splitlines()[0][:120] if str(exc) else ''}]"
        if exc_type is None and not ok:
            why = " [over time budget]"
        detail = "; ".join(self.notes)
        line = (f"CRITERION {self.number} {'PASS' if ok else 'FAIL'} {self.title} "
                f"({elapsed:.2f}s / budget {self.budget:.0f}s){why}" + (f" :: {detail}" if detail else ""))
        _LINES.append(line)
        print(line)
        if exc_type is None:
            assert elapsed < self.budget, line
        return False


@pytest.fixture
def criterion():
    return Criterion


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
