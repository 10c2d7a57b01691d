"""Kernel backend selection.

The hot theta loops exist twice: a compiled Cython extension and a NumPy
fallback.  The compiled kernel is used when importable; INDEFTHETA_PURE=1
forces the fallback (used by the benchmark and the equivalence tests).
"""

import os

from . import fallback
from .program import WeightProgram, compile_polynomial

if os.environ.get("INDEFTHETA_PURE"):
    kernels = fallback
else:
    try:
        from . import _speedups as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = fallback


def backend_name() -> str:
    return kernels.BACKEND_NAME


__all__ = ["WeightProgram", "compile_polynomial", "kernels", "fallback",
           "backend_name"]
