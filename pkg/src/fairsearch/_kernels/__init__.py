"""Hot numeric kernels, selected at import time.

The compiled extension (``_ckernels``, Cython) is preferred; the pure-numpy
twin (``_pykernels``) is used when the extension is unavailable. Both
backends compute every floating-point reduction in the same order, so their
outputs are bit-identical; ``benchmarks/bench_kernels.py`` compares speed.

Set ``FAIRSEARCH_KERNELS=py`` or ``FAIRSEARCH_KERNELS=c`` to force a backend.
"""

import os

_requested = os.environ.get("FAIRSEARCH_KERNELS", "").strip().lower()
if _requested not in ("", "c", "py"):
    raise ImportError(f"FAIRSEARCH_KERNELS must be 'c' or 'py', got {_requested!r}")

if _requested == "py":
    from . import _pykernels as _impl

    BACKEND = "py"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise
        from . import _pykernels as _impl

        BACKEND = "py"

pareto_nondominated = _impl.pareto_nondominated
best_split = _impl.best_split
knn_indices = _impl.knn_indices

__all__ = ["BACKEND", "pareto_nondominated", "best_split", "knn_indices"]
