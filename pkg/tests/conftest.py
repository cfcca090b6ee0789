import numpy as np
import pytest

from polyreg.core import Alphabet


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ab():
    return Alphabet(("a", "b"))


@pytest.fixture
def abc():
    return Alphabet(("a", "b", "c"))


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
