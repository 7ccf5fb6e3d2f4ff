"""Backend selection for the hot kernels.

The compiled extension is preferred. Setting ``CONEFIX_PURE_PYTHON=1``
forces the NumPy fallback, which is also used when the extension was not
built.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("CONEFIX_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

vector_norm = _impl.vector_norm
pair_distance = _impl.pair_distance
pair_table = _impl.pair_table
directed_distance = _impl.directed_distance
nearest_index = _impl.nearest_index
triangle_violations = _impl.triangle_violations

EUCLIDEAN, SUP, WEIGHTED = _pykernels.EUCLIDEAN, _pykernels.SUP, _pykernels.WEIGHTED
NORM_CODES = {"euclidean": EUCLIDEAN, "sup": SUP, "weighted": WEIGHTED}

__all__ = ["BACKEND", "vector_norm", "pair_distance", "pair_table", "directed_distance",
           "nearest_index", "triangle_violations", "NORM_CODES"]
