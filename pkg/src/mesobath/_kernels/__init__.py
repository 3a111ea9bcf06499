"""Bloch-integration kernels: compiled extension with pure-numpy fallback.

The compiled kernel is used when available; set MESOBATH_PURE=1 to force
the numpy implementation (used by the benchmark and the kernel tests).
"""

import os

if os.environ.get("MESOBATH_PURE") == "1":
    from ._fallback import bloch_rk4_batch

    HAVE_COMPILED = False
else:
    try:
        from ._core import bloch_rk4_batch

        HAVE_COMPILED = True
    except ImportError:
        from ._fallback import bloch_rk4_batch

        HAVE_COMPILED = False

__all__ = ["bloch_rk4_batch", "HAVE_COMPILED"]
