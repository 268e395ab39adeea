import importlib.util

import numpy as np
import pytest
from hypothesis import given, strategies as st

from concentra import _backend, _fallback
from concentra.distance import INF, _runs
from concentra.grid import GridSet, row_prefix

compiled = pytest.mark.skipif(importlib.util.find_spec("concentra._kernels") is None,
                              reason="compiled kernels not built")

grids = st.tuples(st.integers(1, 30), st.integers(1, 30), st.integers(0, 2 ** 32 - 1)).map(
    lambda t: np.random.default_rng(t[2]).random((t[0], t[1])) < 0.3)


def test_use_switches_and_rejects_unknown():
    before = _backend.BACKEND
    _backend.use("python")
    assert _backend.kernels is _fallback and _backend.BACKEND == "python"
    _backend.use(before)
    with pytest.raises(ValueError):
        _backend.use("fortran")


def test_threads_env(monkeypatch):
    monkeypatch.setenv("CONCENTRA_THREADS", "3")
    assert _backend.threads() == 3
    monkeypatch.setenv("CONCENTRA_THREADS", "nope")
    assert _backend.threads() == 1


@compiled
class TestEquivalence:
    @given(grids)
    def test_dt_lines(self, m):
        from concentra import _kernels

        a = np.where(m, 0, INF).astype(np.int64)
        b = a.copy()
        _fallback.dt_lines(a, INF, 1)
        _kernels.dt_lines(b, INF, 2)
        assert np.array_equal(a, b)

    @given(grids, st.integers(0, 400))
    def test_dilation_area(self, m, thr):
        from concentra import _kernels

        rows, lo, hi, ptr = _runs(m)
        args = (rows, lo, hi, ptr, 0, thr)
        assert _fallback.dilation_area(*args, 1) == _kernels.dilation_area(*args, 2)

    @given(grids, st.floats(0.5, 12.0))
    def test_disc_counts(self, m, s):
        from concentra import _kernels

        E = GridSet(1.0, (0, 0), m)
        p = row_prefix(E)
        rng = np.random.default_rng(0)
        centers = rng.uniform(-5, 35, size=(40, 2))
        a = _fallback.disc_counts(p, centers, s * s, 1)
        b = _kernels.disc_counts(p, centers, s * s, 2)
        assert np.array_equal(a, b)
