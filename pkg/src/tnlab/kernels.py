"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise, or when
``TNL_PURE_PYTHON`` is set to a non-empty value other than ``0``, the numpy
implementation in ``_core_py`` is used.  Both expose the same functions.
"""
import os

from . import _core_py

_want_python = os.environ.get("TNL_PURE_PYTHON", "") not in ("", "0")

if _want_python:
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _core_py

BACKEND = _impl.BACKEND

contract = _impl.contract
partial_contract = _impl.partial_contract
linear_max = _impl.linear_max
project = _impl.project
poly = _impl.poly
alternating_ascent = _impl.alternating_ascent
sym_ascent = _impl.sym_ascent
enumerate_multilinear = _impl.enumerate_multilinear


def available_backends() -> dict:
    """Map backend name to module for every backend that imports."""
    out = {"python": _core_py}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        out["cython"] = _core
    return out
