import numpy as np
import pytest

from lieminimal.fixtures import builtin_fixture

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store a one-line acceptance verdict, printed in the terminal summary."""

    def _record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def fixture_cache():
    cache = {}

    def get(name, **params):
        key = (name, tuple(sorted(params.items())))
        if key not in cache:
            cache[key] = builtin_fixture(name, params)
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
