"""Selects the compiled kernel core or the NumPy fallback at import time.

Set ``PBK_BACKEND=python`` or ``PBK_BACKEND=compiled`` to force a choice;
the default (``auto``) prefers the compiled extension when it imports.
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("PBK_BACKEND", "auto").lower()

if _choice == "python":
    kernels = _kernels_py
elif _choice == "compiled":
    from . import _kernels as kernels  # ImportError is the caller's answer
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _kernels_py

HAVE_COMPILED = getattr(kernels, "COMPILED", False)


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "python"
