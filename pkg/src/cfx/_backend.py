"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation when
the extension was not built.  Both expose the same functions with identical
(bit-for-bit) numerical behavior, so everything downstream is
backend-agnostic.  Set CFX_BACKEND=python to force the fallback.
"""

import os

if os.environ.get("CFX_BACKEND", "").lower() == "python":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
theta_merge = _impl.theta_merge
gk_iterate = _impl.gk_iterate
