"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it was built; otherwise the
pure-Python twins in ``_purekernels`` are used.  Setting the environment
variable ``QDESIGN_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _purekernels

if os.environ.get("QDESIGN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _purekernels
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _purekernels

BACKEND = "compiled" if _impl is not _purekernels else "python"

FOUND, NONE, BUDGET = _purekernels.FOUND, _purekernels.NONE, _purekernels.BUDGET

exact_cover = _impl.exact_cover
wh_potential_grad = _impl.wh_potential_grad
wh_overlaps = _purekernels.wh_overlaps
