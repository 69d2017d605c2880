import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


import pytest

_ACCEPTANCE: dict[int, str] = {}


class _Criterion:
    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.line: str | None = None

    def check(self, ok: bool, detail: str) -> None:
        """Record the outcome line, then fail the test if ``ok`` is false."""
        status = "PASS" if ok else "FAIL"
        self.line = f"[{status}] criterion {self.number:2d} {self.title}: {detail}"
        print(self.line)
        assert ok, self.line


@pytest.fixture
def criterion(request):
    """Yields a factory for one acceptance line; a test that dies early records FAIL."""
    made: list[_Criterion] = []

    def make(number: int, title: str) -> _Criterion:
        c = _Criterion(number, title)
        made.append(c)
        return c

    yield make
    for c in made:
        _ACCEPTANCE[c.number] = c.line or f"[FAIL] criterion {c.number:2d} {c.title}: did not finish"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
