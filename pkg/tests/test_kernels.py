"""Compiled and pure-Python kernels agree."""
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from ising_exact import _kernels_py, kernels
from ising_exact.odehunt import DEFAULT_PRIME

try:
    from ising_exact import _kernels as _ext
except ImportError:
    _ext = None

needs_ext = pytest.mark.skipif(_ext is None, reason="compiled extension not built")
P = DEFAULT_PRIME


def _matmul_zero(rows, vec, p):
    return all(sum(a * b for a, b in zip(r, vec)) % p == 0 for r in rows)


@given(st.lists(st.lists(st.integers(-10 ** 20, 10 ** 20), min_size=6, max_size=6), min_size=1, max_size=5),
       st.sampled_from([P, 1000003, 7]))
@settings(max_examples=60, deadline=None)
def test_nullspace_python(rows, p):
    basis = _kernels_py.nullspace_mod(rows, 6, p)
    assert all(_matmul_zero(rows, v, p) for v in basis)
    assert len(basis) >= 6 - len(rows)


@needs_ext
@given(st.lists(st.lists(st.integers(0, P - 1), min_size=7, max_size=7), min_size=1, max_size=6),
       st.sampled_from([P, 1000003, 7]))
@settings(max_examples=60, deadline=None)
def test_nullspace_parity(rows, p):
    assert _ext.nullspace_mod(rows, 7, p) == _kernels_py.nullspace_mod(rows, 7, p)


@needs_ext
@given(st.lists(st.integers(0, P - 1), max_size=30), st.lists(st.integers(0, P - 1), max_size=30),
       st.integers(0, 40))
@settings(max_examples=60, deadline=None)
def test_series_mul_parity(a, b, n):
    assert _ext.series_mul_mod(a, b, n, P) == _kernels_py.series_mul_mod(a, b, n, P)


def test_backend_selected():
    assert kernels.BACKEND == ("cython" if _ext is not None else "python")


def test_pure_python_override():
    env = dict(os.environ, ISING_EXACT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from ising_exact import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
