"""Build script for the compiled simplex kernel.

The package works without the extension (a numpy implementation of the same
kernel is selected at import time), so a missing compiler or Cython only
costs speed. Build errors are reported and swallowed.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/gridlife/_core/_simplex.pyx"],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
            "language_level": "3",
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
        ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
except Exception as exc:  # pragma: no cover - only on broken toolchains
    sys.stderr.write(f"gridlife: compiled kernel skipped ({exc}); "
                     "falling back to the pure-python simplex\n")
    ext_modules = []

setup(ext_modules=ext_modules)
