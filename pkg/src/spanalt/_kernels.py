"""Kernel backend selection.

The compiled extension is used when it was built; setting
``SPANALT_PURE_PYTHON=1`` forces the pure-Python implementation.
"""
import os

from . import _pykernels

if os.environ.get("SPANALT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

cyk_recognize = _impl.cyk_recognize
cyk_count = _impl.cyk_count
length_counts = _impl.length_counts
