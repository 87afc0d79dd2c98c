"""Selects the compiled modular kernels when built, else the pure-Python ones.

Set ISING_EXACT_PURE_PYTHON=1 to force the fallback.
"""
import os

BACKEND = "python"

if os.environ.get("ISING_EXACT_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import nullspace_mod, series_mul_mod
else:
    try:
        from ._kernels import nullspace_mod, series_mul_mod
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import nullspace_mod, series_mul_mod

__all__ = ["BACKEND", "nullspace_mod", "series_mul_mod"]
