import importlib.util

import pytest
from hypothesis import settings

from concentra import _backend
from concentra.shapes import ShapeSpec, generate

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

BACKENDS = ["python"] + (["cython"] if importlib.util.find_spec("concentra._kernels") else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run the test once per kernel backend, restoring the original afterwards."""
    before = _backend.BACKEND
    _backend.use(request.param)
    yield request.param
    _backend.use(before)


def shape(kind, h=0.01, seed=0, **params):
    return generate(ShapeSpec(kind, params, h=h, seed=seed))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record a one-line acceptance verdict; the lines are echoed in the terminal summary."""
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
