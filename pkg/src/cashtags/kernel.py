"""Selects the text-scanning kernel at import time.

Prefers the compiled extension; falls back to the pure-Python twin when the
extension is missing or when ``CASHTAGS_PURE_KERNEL=1`` is set. Both expose
``tokenize``, ``scan``, ``EDGE_PUNCTUATION`` and ``IMPLEMENTATION``.
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("CASHTAGS_PURE_KERNEL") == "1":
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_py

tokenize = _impl.tokenize
scan = _impl.scan
EDGE_PUNCTUATION = _impl.EDGE_PUNCTUATION
IMPLEMENTATION = _impl.IMPLEMENTATION

__all__ = ["tokenize", "scan", "EDGE_PUNCTUATION", "IMPLEMENTATION"]
