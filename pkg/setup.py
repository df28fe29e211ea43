"""Build hook that compiles the optional Cython kernels.

The package is fully functional without the extension: ``sleepguard._kernels``
falls back to the pure-Python/numpy implementation when the compiled module
is missing. Any failure here therefore downgrades to a plain install instead
of aborting.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sleepguard._kernels._speedups",
                ["src/sleepguard/_kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - environment dependent
    print(f"sleepguard: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
