"""Kernel backend selection.

The trainer's hot loop lives in four small kernels (gradient accumulation
and sensitivity advance, full and diagonal modes).  A compiled Cython
extension is preferred when it was built; otherwise the numpy fallback is
used.  Both expose the same functions and are kept numerically identical —
``benchmarks/bench_kernels.py`` compares their speed.
"""

from ftkit import _kernels_py as python_backend

try:
    from ftkit import _kernels as compiled_backend
except ImportError:
    compiled_backend = None

active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "compiled" if compiled_backend is not None else "python"


def backends():
    """Mapping of available backend name -> module."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["compiled"] = compiled_backend
    return out
