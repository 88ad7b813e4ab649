"""Select the compiled kernels when available, else the numpy fallback.

Set ``BELTRAMI_LAB_PURE=1`` to force the fallback.
"""

import os

if os.environ.get("BELTRAMI_LAB_PURE") == "1":
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

box_product = _impl.box_product
besov_sum = _impl.besov_sum
oscillation = _impl.oscillation

__all__ = ["BACKEND", "box_product", "besov_sum", "oscillation"]
