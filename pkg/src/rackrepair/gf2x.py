"""GF(2)[x] kernel selection.

The compiled extension is used when it imports; otherwise the pure-Python
kernel.  Setting RACKREPAIR_PURE=1 forces the fallback.
"""

from __future__ import annotations

import os

from . import _gf2x_py

if os.environ.get("RACKREPAIR_PURE"):
    _impl = _gf2x_py
else:
    try:
        from . import _gf2x as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _gf2x_py

BACKEND: str = _impl.BACKEND
Ring = _impl.Ring
clmul = _impl.clmul
clsqr = _impl.clsqr
pdivmod = _gf2x_py.pdivmod
pgcd = _gf2x_py.pgcd

__all__ = ["BACKEND", "Ring", "clmul", "clsqr", "pdivmod", "pgcd"]
