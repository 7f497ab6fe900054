"""Hot-loop kernels: discounted scans and the Adam update.

Two interchangeable backends exist. The compiled Cython extension
(``_scan``) is preferred; a numpy/scipy fallback is selected when the
extension is unavailable or when ``IPO_RL_PURE_PYTHON=1`` is set. Both
backends perform the identical sequence of double-precision operations,
so results are bitwise equal either way.
"""

import os

from . import _numpy_backend

if os.environ.get("IPO_RL_PURE_PYTHON") == "1":
    _impl = _numpy_backend
    BACKEND = "python"
else:
    try:
        from . import _scan as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _numpy_backend
        BACKEND = "python"

discount_cumsum = _impl.discount_cumsum
discounted_return = _impl.discounted_return
adam_step = _impl.adam_step

__all__ = ["BACKEND", "discount_cumsum", "discounted_return", "adam_step"]
