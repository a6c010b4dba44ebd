"""NumPy implementation of the tensor-interpolant evaluation kernel.

Used when the compiled extension is unavailable; also serves as the reference
the compiled kernel is tested against.
"""

import numpy as np

_CHUNK = 8192


def _basis(y, ynodes, weights):
    diff = y[..., None] - ynodes
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = weights / diff
        b = terms / terms.sum(axis=-1, keepdims=True)
    hit = exact.any(axis=-1)
    if hit.any():
        b[hit] = exact[hit].astype(float)
    return b


def eval_tensor(lo, hi, values, ynodes, weights, cell_idx, pts, out):
    """Evaluate per-cell tensor interpolants.

    ``values[c]`` holds the ``s**l`` node values of cell ``c`` in C order;
    ``ynodes``/``weights`` are the reference nodes on [0, 1] and their
    barycentric weights.  Writes ``out[i]`` for the point ``pts[i]`` in cell
    ``cell_idx[i]``.
    """
    n, l = pts.shape
    s = len(ynodes)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(n, start + _CHUNK))
        c = cell_idx[sl]
        a = lo[c]
        y = (pts[sl] - a) / (hi[c] - a)
        B = _basis(y, ynodes, weights)  # (m, l, s)
        acc = values[c].reshape((-1,) + (s,) * l)
        for d in range(l - 1, -1, -1):
            acc = np.einsum("m...j,mj->m...", acc, B[:, d, :])
        out[sl] = acc
    return out
