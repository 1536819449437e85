"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the pure
Python kernels are the fallback.  ``SIRCAP_KERNELS=python`` or
``SIRCAP_KERNELS=compiled`` in the environment forces a choice (the
latter raises if the extension is unavailable).
"""

from __future__ import annotations

import os

_choice = os.environ.get("SIRCAP_KERNELS", "auto").strip().lower()

if _choice in ("auto", "", "compiled"):
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        from . import _kernels_py as _impl
        BACKEND = "python"
elif _choice == "python":
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    raise ImportError(f"unknown SIRCAP_KERNELS value: {_choice!r}")

rk4_const = _impl.rk4_const
rk4_arc = _impl.rk4_arc
rk4_const_until = _impl.rk4_const_until
policy_tail_batch = _impl.policy_tail_batch
