"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
reference implementation takes over.  Set ``V2VCODEC_PURE_PYTHON=1`` to
force the fallback (useful for cross-checking and benchmarking).
"""

import os

from . import _kernels_py as python_backend

try:
    from . import _kernels as compiled_backend  # type: ignore[attr-defined]
except ImportError:  # extension not built
    compiled_backend = None

HAVE_COMPILED = compiled_backend is not None
_forced = os.environ.get("V2VCODEC_PURE_PYTHON", "").lower() in ("1", "true", "yes")

if HAVE_COMPILED and not _forced:
    BACKEND = "compiled"
    _active = compiled_backend
else:
    BACKEND = "python"
    _active = python_backend

viterbi = _active.viterbi
max_log_map = _active.max_log_map
sum_product = _active.sum_product


def get_backend(name: str):
    """Return a specific backend module (``"python"`` or ``"compiled"``)."""
    if name == "python":
        return python_backend
    if name == "compiled":
        if compiled_backend is None:
            raise ImportError("compiled kernels are not built")
        return compiled_backend
    raise ValueError(f"unknown backend {name!r}")
