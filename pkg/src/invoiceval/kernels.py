"""Kernel backend selection.

Imports the compiled extension when present, otherwise the pure-Python
twin. INVOICEVAL_PURE=1 forces the fallback (used by the benchmark to
compare both backends in one process tree).
"""

from __future__ import annotations

import os

if os.environ.get("INVOICEVAL_PURE"):
    from . import _speedups_py as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _speedups_py as _impl

levenshtein = _impl.levenshtein
BACKEND: str = _impl.BACKEND
