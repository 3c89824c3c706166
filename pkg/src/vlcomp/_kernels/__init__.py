"""Hot-kernel dispatch: numba-compiled by default, pure numpy on request.

Set VLCOMP_DISABLE_NUMBA=1 to force the numpy fallback (also used
automatically when numba is not importable). Both backends implement the
same signatures and agree numerically; benchmarks/bench_kernels.py compares
their throughput.
"""

import os

# workqueue is always available and keeps results independent of the TBB version
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

_flag = os.environ.get("VLCOMP_DISABLE_NUMBA", "").strip().lower()
_want_numba = _flag not in ("1", "true", "yes")

BACKEND = "numpy"
if _want_numba:
    try:
        from . import numba_impl as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        from . import numpy_impl as _impl
else:
    from . import numpy_impl as _impl

from . import numpy_impl  # noqa: E402  (always importable; used as reference in tests)

C_RATE = _impl.C_RATE
los_gain_matrix = _impl.los_gain_matrix
element_transfer_matrix = _impl.element_transfer_matrix
p1_scan = _impl.p1_scan
p3_scan = _impl.p3_scan

__all__ = ["BACKEND", "C_RATE", "los_gain_matrix", "element_transfer_matrix",
           "p1_scan", "p3_scan", "numpy_impl"]
