"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``ATOMCOHERENCE_PURE_PYTHON`` is set to a non-empty
value other than ``0``, the numpy fallback is used. ``BACKEND`` names the
active choice.
"""

import os

from . import _kernels_py

_force_py = os.environ.get("ATOMCOHERENCE_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

chi3_average = _impl.chi3_average
pv_trapezoid = _impl.pv_trapezoid

__all__ = ["BACKEND", "chi3_average", "pv_trapezoid"]
