"""Selects the decoder kernel backend.

The compiled extension is preferred when importable; set UDOC_PURE_PYTHON=1
(before the first decode) to force the NumPy/Python reference backend.
"""

from __future__ import annotations

import os

_impl = None


def impl():
    global _impl
    if _impl is None:
        if os.environ.get("UDOC_PURE_PYTHON"):
            from . import pure

            _impl = pure
        else:
            try:
                from . import _kernels

                _impl = _kernels
            except ImportError:
                from . import pure

                _impl = pure
    return _impl


def backend_name() -> str:
    return impl().BACKEND_NAME


def have_kernels() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
