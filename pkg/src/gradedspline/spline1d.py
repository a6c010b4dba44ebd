"""Continuous piecewise Chebyshev interpolants on a 1D mesh."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .cheb import barycentric_weights, reference_nodes
from .mesh1d import Mesh1D

__all__ = [
    "Spline1D",
    "build_spline1d",
    "eval_spline1d",
    "node_count",
    "sample_points",
    "sup_error",
]


@dataclass(frozen=True)
class Spline1D:
    mesh: Mesh1D
    s: int
    nodes: np.ndarray  # (n_intervals, s) interpolation points
    values: np.ndarray  # (n_intervals, s)
    source: str = ""

    @property
    def node_inventory(self) -> np.ndarray:
        return np.unique(self.nodes)

    @property
    def n_nodes(self) -> int:
        return len(self.node_inventory)

    def __call__(self, t):
        return eval_spline1d(self, t)


def _node_matrix(mesh: Mesh1D, s: int) -> np.ndarray:
    y = reference_nodes(s)
    a = mesh.breakpoints[:-1, None]
    b = mesh.breakpoints[1:, None]
    x = a * (1.0 - y) + b * y
    # endpoints are shared exactly with the neighbours
    x[:, 0] = mesh.breakpoints[:-1]
    x[:, -1] = mesh.breakpoints[1:]
    return x


def build_spline1d(f, mesh: Mesh1D, s: int, source: str = "") -> Spline1D:
    """Interpolate ``f`` at ``s`` anchored Chebyshev nodes on every mesh interval."""
    if s < 2:
        raise ValueError("continuous assembly needs s >= 2 (nodes on both endpoints)")
    x = _node_matrix(mesh, s)
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValueError(f"non-finite function value at node {j} of interval {i} (t = {x[i, j]!r})")
    if not source:
        source = getattr(f, "family", "") or getattr(f, "__name__", "")
    return Spline1D(mesh, s, x, vals, str(source))


def eval_spline1d(sp: Spline1D, t):
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    idx = sp.mesh.locate(flat)
    bp = sp.mesh.breakpoints
    y = reference_nodes(sp.s)
    out = kernels.eval_tensor(
        bp[:-1, None], bp[1:, None], sp.values, y, barycentric_weights(y), idx, flat[:, None]
    )
    return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)


def node_count(mesh: Mesh1D, s: int) -> int:
    """Distinct interpolation points of a continuous spline: ``(s - 1) * intervals + 1``."""
    return len(np.unique(_node_matrix(mesh, s)))


def _lobatto(q: int) -> np.ndarray:
    # Chebyshev-Lobatto points on [0, 1], ends included
    j = np.arange(q)
    y = (1.0 - np.cos(np.pi * j / (q - 1))) / 2.0
    y[0], y[-1] = 0.0, 1.0
    return y


def sample_points(mesh: Mesh1D, q: int = 33, ladder: int = 30) -> np.ndarray:
    """Sampling set for sup-norm estimates.

    ``q`` Chebyshev-Lobatto points per interval, plus a geometric ladder
    toward -1 and +1 inside the two boundary intervals.
    """
    if q < 3:
        raise ValueError("need at least 3 samples per interval")
    bp = mesh.breakpoints
    a, b = bp[:-1, None], bp[1:, None]
    y = _lobatto(q)
    pts = (a * (1.0 - y) + b * y).ravel()
    h0, h1 = bp[1] - bp[0], bp[-1] - bp[-2]
    g = 2.0 ** -np.arange(1, ladder + 1)
    pts = np.concatenate([pts, -1.0 + h0 * g, 1.0 - h1 * g])
    return np.unique(np.clip(pts, -1.0, 1.0))


def sup_error(sp: Spline1D, f, q: int = 33, points: np.ndarray | None = None) -> float:
    """Sampled ``max |f - sp|`` on [-1, 1]."""
    if points is None:
        points = sample_points(sp.mesh, q)
    diff = np.abs(np.asarray(f(points), dtype=float) - eval_spline1d(sp, points))
    return float(np.max(diff))
