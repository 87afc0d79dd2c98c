import os

from setuptools import setup

ext_modules = []
if os.environ.get("ISING_EXACT_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("ising_exact._kernels", ["src/ising_exact/_kernels.pyx"])],
            language_level=3,
        )
    except ImportError:
        # no Cython: the package falls back to the pure-Python kernels
        ext_modules = []

setup(ext_modules=ext_modules)
