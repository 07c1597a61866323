"""Backend selection for the dense-table kernels.

Prefers the compiled Cython extension and falls back to the numpy twin when
the extension is absent.  Set ``FACTORARGS_PURE=1`` to force the fallback
(useful for benchmarking and for debugging backend parity).
"""

import os

from . import _kernels_py

if os.environ.get("FACTORARGS_PURE"):
    _backend = _kernels_py
else:
    try:
        from . import _ckernels as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _kernels_py

BACKEND = _backend.NAME

multiply = _backend.multiply
sum_out = _backend.sum_out
divide = _backend.divide
weighted_marginal = _backend.weighted_marginal
