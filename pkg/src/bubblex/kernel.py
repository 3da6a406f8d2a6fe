"""Kernel selection: compiled extension when built, pure Python otherwise.

Set BUBBLEX_PURE=1 to force the pure-Python kernel even when the compiled
one is importable (used by the benchmark and the twin tests).
"""

from __future__ import annotations

import os

from bubblex import _kernel_py

if os.environ.get("BUBBLEX_PURE"):
    _impl = _kernel_py
    BACKEND = "python"
else:
    try:
        from bubblex import _kernel_cy as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernel_py
        BACKEND = "python"

SHIFT = _kernel_py.SHIFT
MASK = _kernel_py.MASK

kmul = _impl.kmul
kadd = _impl.kadd
kaccum = _impl.kaccum
kscale = _impl.kscale
kneg = _impl.kneg
