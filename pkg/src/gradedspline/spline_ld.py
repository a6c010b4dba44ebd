"""Tensor-product Chebyshev local splines on cube partitions.

The discontinuous spline interpolates ``f`` independently on every cell.  The
continuous one is built on an aligned partition from the central cell
outward: a node lying on the inner surface of layer ``k`` takes the value of
the already-built layer ``k + 1`` spline there instead of ``f``.  Because
layer ``k`` refines the face grid of layer ``k + 1``, the traces agree on
the whole interface; inside a layer, neighbouring cells share their face
nodes, so no further gluing is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .cheb import barycentric_weights, reference_nodes
from .classes import ClassKind, DerivedParams, FunctionClassSpec, derive_params
from .mesh_ld import PartitionLD

__all__ = [
    "InterpolantLD",
    "SplineLD",
    "nodes_per_dim",
    "tensor_interpolate",
    "build_spline_ld",
    "eval_spline_ld",
    "sample_points_ld",
    "sup_error_ld",
    "max_interface_jump",
]


def nodes_per_dim(spec: FunctionClassSpec, derived: DerivedParams | None = None) -> int:
    """Chebyshev nodes per axis: ``s``, or ``s + 1`` for Q_u classes with ``s = r + 1``."""
    d = derived or derive_params(spec)
    if spec.kind is ClassKind.Q_u and d.s == spec.r + 1:
        return d.s + 1
    return d.s


def _tensor_nodes(lo: np.ndarray, hi: np.ndarray, s: int) -> np.ndarray:
    """Node points of every cell, shape ``(ncells, s**l, l)`` in C order."""
    y = reference_nodes(s)
    ncell, l = lo.shape
    axes = lo[:, :, None] * (1.0 - y) + hi[:, :, None] * y  # (ncell, l, s)
    axes[:, :, 0] = lo
    axes[:, :, -1] = hi
    grids = np.meshgrid(*[np.arange(s)] * l, indexing="ij")
    out = np.empty((ncell, s**l, l))
    for d in range(l):
        out[:, :, d] = axes[:, d, grids[d].ravel()]
    return out


def _eval_f(f, pts: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(pts), dtype=float).reshape(len(pts))
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"non-finite function value at node {tuple(pts[i])}")
    return vals


@dataclass(frozen=True)
class InterpolantLD:
    lo: np.ndarray
    hi: np.ndarray
    s: int
    values: np.ndarray  # s**l node values, C order

    @property
    def nodes(self) -> np.ndarray:
        return _tensor_nodes(self.lo[None], self.hi[None], self.s)[0]

    def __call__(self, t):
        t = np.atleast_2d(np.asarray(t, dtype=float))
        y = reference_nodes(self.s)
        return kernels.eval_tensor(self.lo[None], self.hi[None], self.values[None], y,
                                   barycentric_weights(y), np.zeros(len(t), np.int64), t)


def tensor_interpolate(f, lo, hi, s: int) -> InterpolantLD:
    """Interpolant of ``f`` on the box ``[lo, hi]`` at the ``s**l`` tensor Chebyshev nodes."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(hi <= lo):
        raise ValueError("empty box")
    pts = _tensor_nodes(lo[None], hi[None], s)[0]
    return InterpolantLD(lo, hi, s, _eval_f(f, pts))


@dataclass(frozen=True)
class SplineLD:
    partition: PartitionLD
    s: int
    values: np.ndarray  # (ncells, s**l)
    continuous: bool

    @property
    def l(self) -> int:
        return self.partition.l

    def node_points(self) -> np.ndarray:
        p = self.partition
        return _tensor_nodes(p.lo, p.hi, self.s).reshape(-1, p.l)

    @property
    def n_nodes(self) -> int:
        """Distinct interpolation points over all cells."""
        return len(np.unique(self.node_points(), axis=0))

    def eval_cells(self, cell_idx, pts) -> np.ndarray:
        y = reference_nodes(self.s)
        p = self.partition
        return kernels.eval_tensor(p.lo, p.hi, self.values, y, barycentric_weights(y), cell_idx, pts)

    def __call__(self, t):
        return eval_spline_ld(self, t)


def build_spline_ld(f, partition: PartitionLD, s: int, continuous: bool = False) -> SplineLD:
    if s < 2:
        raise ValueError("need at least 2 nodes per axis")
    if continuous and partition.variant != "aligned":
        raise ValueError("the continuous spline needs an aligned partition")
    p = partition
    nodes = _tensor_nodes(p.lo, p.hi, s)
    if not continuous:
        vals = _eval_f(f, nodes.reshape(-1, p.l)).reshape(p.n_cells, -1)
        return SplineLD(p, s, vals, False)
    vals = np.empty((p.n_cells, s**p.l))
    w = p.w
    y = reference_nodes(s)
    bw = barycentric_weights(y)
    for k in range(p.N - 1, -1, -1):
        cells = np.flatnonzero(p.layer == k)
        pts = nodes[cells].reshape(-1, p.l)
        out = np.empty(len(pts))
        if k == p.N - 1:
            out[:] = _eval_f(f, pts)
        else:
            on = np.max(np.abs(pts), axis=1) == w[k + 1]
            if (~on).any():
                out[~on] = _eval_f(f, pts[~on])
            if on.any():
                inner = p.locate(pts[on], layer=k + 1)
                out[on] = kernels.eval_tensor(p.lo, p.hi, vals, y, bw, inner, pts[on])
        vals[cells] = out.reshape(len(cells), -1)
    return SplineLD(p, s, vals, True)


def eval_spline_ld(sp: SplineLD, t):
    t = np.asarray(t, dtype=float)
    pts = t.reshape(-1, sp.l)
    out = sp.eval_cells(sp.partition.locate(pts), pts)
    return float(out[0]) if t.ndim == 1 else out.reshape(t.shape[:-1])


def _lobatto(q: int) -> np.ndarray:
    y = (1.0 - np.cos(np.pi * np.arange(q) / (q - 1))) / 2.0
    y[0], y[-1] = 0.0, 1.0
    return y


def _cell_samples(lo, hi, y):
    l = lo.shape[1]
    q = len(y)
    grids = np.meshgrid(*[np.arange(q)] * l, indexing="ij")
    out = np.empty((len(lo), q**l, l))
    for d in range(l):
        ax = lo[:, d, None] * (1.0 - y) + hi[:, d, None] * y
        out[:, :, d] = ax[:, grids[d].ravel()]
    return out


def sample_points_ld(partition: PartitionLD, q: int = 9, ladder: int = 20):
    """Yield ``(cell_idx, points)`` batches covering all cells.

    Each cell gets a ``q**l`` tensor of Chebyshev-Lobatto points (vertices
    included); cells touching the boundary also get a geometric ladder
    ``2**-j`` of slices toward each boundary face they touch.
    """
    if q < 3:
        raise ValueError("need at least 3 samples per axis")
    p = partition
    y = _lobatto(q)
    chunk = max(1, 200_000 // q**p.l)
    for c0 in range(0, p.n_cells, chunk):
        idx = np.arange(c0, min(p.n_cells, c0 + chunk))
        pts = _cell_samples(p.lo[idx], p.hi[idx], y)
        yield np.repeat(idx, pts.shape[1]), pts.reshape(-1, p.l)
    g = 2.0 ** -np.arange(1, ladder + 1)
    yt = y[1:-1]
    for d in range(p.l):
        for side in (-1.0, 1.0):
            touch = np.flatnonzero((p.lo[:, d] if side < 0 else p.hi[:, d]) == side)
            if len(touch) == 0:
                continue
            lo, hi = p.lo[touch], p.hi[touch]
            tang = [e for e in range(p.l) if e != d]
            # tangential Lobatto tensor x ladder in the normal direction
            mesh = np.meshgrid(*[np.arange(len(yt))] * len(tang), np.arange(ladder), indexing="ij")
            flat = [m.ravel() for m in mesh]
            pts = np.empty((len(touch), len(flat[0]), p.l))
            for i, e in enumerate(tang):
                ax = lo[:, e, None] * (1.0 - yt) + hi[:, e, None] * yt
                pts[:, :, e] = ax[:, flat[i]]
            edge = hi[:, d] - lo[:, d]
            pts[:, :, d] = side - side * edge[:, None] * g[flat[-1]][None, :]
            yield np.repeat(touch, pts.shape[1]), pts.reshape(-1, p.l)


def sup_error_ld(sp: SplineLD, f, q: int = 9) -> float:
    """Sampled ``max |f - sp|`` over the cube."""
    worst = 0.0
    for idx, pts in sample_points_ld(sp.partition, q):
        err = np.abs(np.asarray(f(pts), dtype=float) - sp.eval_cells(idx, pts))
        worst = max(worst, float(np.max(err)))
    return worst


def max_interface_jump(sp: SplineLD, q: int = 5) -> float:
    """Largest sampled difference between the two one-sided values on interior faces.

    Points are placed at ``q**(l-1)`` interior Chebyshev positions on every
    face; the neighbour is found by stepping a tiny distance along the
    outward normal and its polynomial is evaluated back on the face.
    """
    p = sp.partition
    l = p.l
    y = reference_nodes(q + 2)[1:-1]
    edges = p.hi - p.lo
    delta = 1e-7 * float(np.min(edges))
    worst = 0.0
    mesh = np.meshgrid(*[np.arange(q)] * (l - 1), indexing="ij")
    flat = [m.ravel() for m in mesh]
    for d in range(l):
        tang = [e for e in range(l) if e != d]
        for side in (-1.0, 1.0):
            face = p.hi[:, d] if side > 0 else p.lo[:, d]
            cells = np.flatnonzero(np.abs(face) < 1.0)
            if len(cells) == 0:
                continue
            pts = np.empty((len(cells), len(flat[0]) if flat else 1, l))
            for i, e in enumerate(tang):
                ax = p.lo[cells, e, None] * (1.0 - y) + p.hi[cells, e, None] * y
                pts[:, :, e] = ax[:, flat[i]]
            pts[:, :, d] = face[cells, None]
            pts = pts.reshape(-1, l)
            own = np.repeat(cells, len(pts) // len(cells))
            probe = pts.copy()
            probe[:, d] += side * delta
            nb = p.locate(probe)
            a = sp.eval_cells(own, pts)
            b = sp.eval_cells(nb, pts)
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst
