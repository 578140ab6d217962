import time
from contextlib import contextmanager

import pytest

_RESULTS: dict[int, tuple[str, str, float, str]] = {}


class _Criterion:
    def __init__(self, number: int, title: str, budget: float):
        self.number, self.title, self.budget = number, title, budget
        self.details: list[str] = []

    def note(self, text: str) -> None:
        self.details.append(text)


@pytest.fixture
def criterion():
    """Context manager recording the outcome and runtime of one acceptance criterion."""

    @contextmanager
    def _run(number: int, title: str, budget: float):
        c = _Criterion(number, title, budget)
        start = time.perf_counter()
        try:
            yield c
            elapsed = time.perf_counter() - start
            assert elapsed < budget, f"took {elapsed:.2f} s, budget {budget:g} s"
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            _RESULTS[number] = ("FAIL", title, elapsed, f"{type(exc).__name__}: {exc}".splitlines()[0])
            raise
        _RESULTS[number] = ("PASS", title, elapsed, "; ".join(c.details))

    return _run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title, elapsed, detail = _RESULTS[n]
        line = f"{status} criterion {n:2d}: {title} ({elapsed:.2f} s)"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
