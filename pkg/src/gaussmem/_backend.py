"""Pick the annealing kernel at import time.

The compiled extension is preferred; set ``GAUSSMEM_BACKEND=python`` to force
the pure-Python fallback.
"""

import os
import warnings

from . import _kernels_py

try:
    from . import _kernels
except ImportError:  # extension not built
    _kernels = None

HAVE_CYTHON = _kernels is not None
BACKEND = "python"
anneal_kernel = _kernels_py.anneal_kernel

if os.environ.get("GAUSSMEM_BACKEND", "").lower() != "python":
    if HAVE_CYTHON:
        BACKEND = "cython"
        anneal_kernel = _kernels.anneal_kernel
    else:
        warnings.warn(
            "gaussmem compiled kernel unavailable; using the slow pure-Python "
            "annealer (build with `pip install -e . --no-build-isolation`)",
            RuntimeWarning,
            stacklevel=2,
        )


def get_kernel(name=None):
    """Return the kernel for ``name`` ('cython' or 'python'), default the active one."""
    if name is None:
        return anneal_kernel
    if name == "python":
        return _kernels_py.anneal_kernel
    if name == "cython":
        if not HAVE_CYTHON:
            raise ImportError("compiled kernel gaussmem._kernels is not built")
        return _kernels.anneal_kernel
    raise ValueError(f"unknown backend {name!r}")
