"""Backend selection for the hot evaluation kernel.

The compiled extension is used when it imports; setting the environment
variable ``GRADEDSPLINE_PURE_PYTHON=1`` forces the NumPy fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py.eval_tensor

if os.environ.get("GRADEDSPLINE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None
    if _compiled is not None:
        _impl = _compiled.eval_tensor
        BACKEND = "cython"


def eval_tensor(lo, hi, values, ynodes, weights, cell_idx, pts, backend: str | None = None):
    """Evaluate tensor Chebyshev interpolants at ``pts``; see ``_kernels_py.eval_tensor``."""
    lo = np.ascontiguousarray(lo, dtype=np.float64)
    hi = np.ascontiguousarray(hi, dtype=np.float64)
    values = np.ascontiguousarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    values = values.reshape(len(values), -1)
    ynodes = np.ascontiguousarray(ynodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    cell_idx = np.ascontiguousarray(cell_idx, dtype=np.int64)
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    out = np.empty(len(pts), dtype=np.float64)
    if len(pts) == 0:
        return out
    if backend is None:
        fn = _impl
    elif backend == "python":
        fn = _kernels_py.eval_tensor
    elif backend == "cython":
        if BACKEND != "cython":
            raise RuntimeError("compiled kernel is not available")
        fn = _compiled.eval_tensor
    else:
        raise ValueError(f"unknown backend {backend!r}")
    fn(lo, hi, values, ynodes, weights, cell_idx, pts, out)
    return out
