"""Build the optional compiled kernel module.

The package works without it: ``pinsync._backend`` falls back to the pure
NumPy kernels when ``pinsync._kernels`` cannot be imported.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("PINSYNC_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "pinsync._kernels",
                    ["src/pinsync/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError as exc:  # pragma: no cover
        print(f"pinsync: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
