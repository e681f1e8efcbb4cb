"""Kernel backend selection.

The compiled module ``pinsync._kernels`` is used when it imports; otherwise the
pure NumPy module ``pinsync._pykernels`` is used. Setting the environment
variable ``PINSYNC_BACKEND=python`` forces the fallback.
"""
import os

from . import _pykernels

python = _pykernels

try:
    from . import _kernels as compiled
except ImportError:  # pragma: no cover - depends on the build
    compiled = None

if os.environ.get("PINSYNC_BACKEND", "").lower() == "python" or compiled is None:
    kernels = _pykernels
    name = "python"
else:
    kernels = compiled
    name = "compiled"


def available():
    """Names of the importable backends."""
    return ["python"] + (["compiled"] if compiled is not None else [])


def get(backend=None):
    """Return the kernel module for ``backend`` (``None`` means the active one)."""
    if backend is None:
        return kernels
    if backend == "python":
        return _pykernels
    if backend == "compiled":
        if compiled is None:
            raise ImportError("compiled kernels are not built")
        return compiled
    raise ValueError(f"unknown backend {backend!r}")
