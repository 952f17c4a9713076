"""Kernel backend selection.

The hot loops exist twice: JIT-compiled in ``_kernels_numba`` and as
pure-numpy fallbacks in ``_kernels_numpy``.  Both produce identical
states and identical martingale floats.  Selection:

* ``EXALOGLOG_BACKEND=numpy`` forces the fallback.
* ``EXALOGLOG_BACKEND=numba`` requires the JIT kernels (import error if
  numba is unavailable).
* unset: numba when importable, numpy otherwise.

``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

_requested = os.environ.get("EXALOGLOG_BACKEND", "").strip().lower()

if _requested == "numpy":
    from . import _kernels_numpy as kernels
elif _requested == "numba":
    from . import _kernels_numba as kernels
elif _requested == "":
    try:
        from . import _kernels_numba as kernels
    except ImportError:  # pragma: no cover - depends on environment
        from . import _kernels_numpy as kernels
else:
    raise RuntimeError(
        f"EXALOGLOG_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

BACKEND = kernels.NAME
