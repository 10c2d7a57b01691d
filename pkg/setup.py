"""Build script: compiles the optional Cython kernel for the hot theta loops.

The package works without the extension (a NumPy fallback is selected at
import time); the build therefore degrades gracefully when Cython or a C
compiler is unavailable.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "indeftheta._core._speedups",
                ["src/indeftheta/_core/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"indeftheta: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
