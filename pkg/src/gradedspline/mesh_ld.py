"""Boundary-layer partitions of the cube [-1, 1]^l.

Layer ``k`` is the frame ``rho_k <= d(t, Gamma) <= rho_{k+1}`` with
``rho_k = (k/N)**v``; equivalently ``w_{k+1} <= max|t_i| <= w_k`` where
``w_k = 1 - rho_k``.  The last layer (``k = N - 1``) is the central cube.

Two constructions:

independent
    every frame is cut into ``2l`` face slabs (precedence x1-, x1+, x2-, ...),
    each slab gridded into parents with edges in ``[h_k, 2h_k)`` and every
    parent split into ``M_k**l`` equal subcells.  Cells of different slabs or
    layers need not share vertices.
aligned
    built from the centre outward: layer ``k`` is a tensor grid with the
    inner cube removed, whose inner coordinates refine those of layer
    ``k + 1``.  Shared faces are therefore conforming and the interlayer
    vertex sets nest, which is what the continuous spline needs.  Each frame
    is stored as the same 2l face slabs, all sharing one breakpoint array.

Cells are stored in flat arrays grouped into tensor-grid *blocks*; point
location goes layer -> block -> per-axis binary search.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._numeric import guarded_ceil, log_power
from .classes import ClassKind, DerivedParams, FunctionClassSpec, derive_params
from .mesh1d import ScheduleWarning

__all__ = [
    "Cell",
    "Block",
    "PartitionLD",
    "graded_radii",
    "layer_widths",
    "layer_index",
    "decompose_layer",
    "subdivide_cell",
    "schedule_ld",
    "SCHEDULES",
    "regime",
    "decompose_domain",
    "decompose_domain_aligned",
    "count_cells",
    "check_volume",
    "check_edge_window",
    "check_vertex_nesting",
    "check_conformity",
    "check_disjoint",
    "dump_partition",
    "read_partition_dump",
]

_SPLIT_SLACK = 1e-9
_REL_TOL = 1e-12
_ABS_TOL = 4 * 2.0**-52


# ---------------------------------------------------------------------------
# radii and layers


def graded_radii(N: int, v: float) -> np.ndarray:
    """``rho_k = (k/N)**v`` for k = 0..N with exact end values 0 and 1."""
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if not v > 1:
        raise ValueError(f"grading exponent must exceed 1, got {v}")
    rho = (np.arange(N + 1) / N) ** v
    rho[0], rho[-1] = 0.0, 1.0
    return rho


def layer_widths(rho: np.ndarray) -> np.ndarray:
    """``h_k = rho_{k+1} - rho_k``."""
    return np.diff(rho)


def _layer_of_sup(m: np.ndarray, rho: np.ndarray) -> np.ndarray:
    # layer k holds w_{k+1} <= m <= w_k; a tie m == w_{k+1} stays in layer k
    w_inner = (1.0 - rho[1:-1])[::-1]  # ascending w_{N-1}, ..., w_1
    n_larger = len(w_inner) - np.searchsorted(w_inner, m, side="right")
    return n_larger


def layer_index(t, N: int, v: float):
    """Layer ``k`` with ``(k/N)**v <= d(t, Gamma) <= ((k+1)/N)**v``; ties go to the lower k."""
    t = np.asarray(t, dtype=float)
    pts = t if t.ndim > 1 else t[None, :] if t.ndim == 1 else t.reshape(1, 1)
    if np.any(np.abs(pts) > 1.0):
        raise ValueError("points must lie in the cube")
    k = _layer_of_sup(np.max(np.abs(pts), axis=1), graded_radii(N, v))
    return int(k[0]) if t.ndim <= 1 else k


# ---------------------------------------------------------------------------
# cells and blocks


@dataclass(frozen=True)
class Cell:
    lo: tuple
    hi: tuple
    layer: int
    iid: tuple = ()
    jid: tuple = ()

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi differ in dimension")
        for a, b in zip(self.lo, self.hi):
            if not a < b:
                raise ValueError(f"degenerate cell edge [{a}, {b}]")
            if a < -1.0 or b > 1.0:
                raise ValueError("cell leaves the cube")

    @property
    def l(self) -> int:
        return len(self.lo)

    @property
    def edges(self) -> tuple:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def volume(self) -> float:
        return float(np.prod(self.edges))


def _equal_split(a: float, b: float, p: int) -> np.ndarray:
    j = np.arange(p + 1) / p
    x = a * (1.0 - j) + b * j
    x[0], x[-1] = a, b
    return x


def _subdivide_breaks(parent: np.ndarray, M: int) -> np.ndarray:
    if M == 1:
        return parent.copy()
    parts = [parent[:1]]
    for a, b in zip(parent[:-1], parent[1:]):
        parts.append(_equal_split(a, b, M)[1:])
    return np.concatenate(parts)


def subdivide_cell(cell: Cell, M: int) -> list[Cell]:
    """Split every edge of ``cell`` into ``M`` equal parts; ``M**l`` subcells in C order."""
    if int(M) != M or M < 1:
        raise ValueError("M must be a positive integer")
    axes = [_equal_split(a, b, M) for a, b in zip(cell.lo, cell.hi)]
    out = []
    for idx in np.ndindex(*(M,) * cell.l):
        lo = tuple(float(axes[d][i]) for d, i in enumerate(idx))
        hi = tuple(float(axes[d][i + 1]) for d, i in enumerate(idx))
        out.append(Cell(lo, hi, cell.layer, cell.iid, tuple(idx)))
    return out


def _parent_pieces(length: float, h: float) -> int:
    # equal pieces no longer than 2h (strictly) and, since length >= h, no shorter than h
    return max(1, math.ceil(length / (2.0 * h) * (1.0 + _SPLIT_SLACK)))


@dataclass
class Block:
    """Tensor grid of cells inside one layer.

    ``edges[d]`` are the breakpoints along axis d and ``parents[d]`` the
    pre-subdivision breakpoints.  ``lookup`` maps a multi-index to a global
    cell id.
    """

    layer: int
    tag: str
    edges: tuple
    parents: tuple
    M: int
    offset: int = 0
    lookup: np.ndarray | None = None

    @property
    def shape(self) -> tuple:
        return tuple(len(e) - 1 for e in self.edges)

    @property
    def lo(self) -> np.ndarray:
        return np.array([e[0] for e in self.edges])

    @property
    def hi(self) -> np.ndarray:
        return np.array([e[-1] for e in self.edges])


def _face_slabs(k: int, inner: np.ndarray, low: np.ndarray, high: np.ndarray,
                full: np.ndarray, M: int, l: int, parents=None) -> list[Block]:
    """Split a frame into 2l tensor blocks, precedence x1-, x1+, x2-, ...

    Block (i, side): axes before i span ``inner``, axis i the band, axes
    after i span ``full``.
    """
    blocks = []
    for i in range(l):
        for band, tag in ((low, "-"), (high, "+")):
            edges = tuple(inner if d < i else band if d == i else full for d in range(l))
            blocks.append(Block(k, f"x{i + 1}{tag}", edges, edges if parents is None else parents(i, tag), M))
    return blocks


def _slab_blocks(k: int, w_out: float, w_in: float, h: float, M: int, l: int) -> list[Block]:
    inner = _equal_split(-w_in, w_in, _parent_pieces(2 * w_in, h))
    outer = _equal_split(-w_out, w_out, _parent_pieces(2 * w_out, h))
    nb = _parent_pieces(w_out - w_in, h)
    low = _equal_split(-w_out, -w_in, nb)
    high = _equal_split(w_in, w_out, nb)
    sub = {id(a): _subdivide_breaks(a, M) for a in (inner, outer, low, high)}

    def parents(i, tag):
        band = low if tag == "-" else high
        return tuple(inner if d < i else band if d == i else outer for d in range(l))

    return _face_slabs(k, sub[id(inner)], sub[id(low)], sub[id(high)], sub[id(outer)], M, l, parents)


def _core_block(k: int, w: float, h: float, M: int, l: int, whole: bool) -> Block:
    p = 1 if whole else _parent_pieces(2 * w, h)
    parent = _equal_split(-w, w, p)
    parents = (parent,) * l
    edges = tuple(_subdivide_breaks(parent, 1 if whole else M) for _ in range(l))
    return Block(k, "core", edges, parents, 1 if whole else M)


def decompose_layer(k: int, N: int, v: float, l: int, M: int = 1) -> list[Cell]:
    """Cells of layer ``k`` in the independent construction, after ``M``-fold subdivision."""
    rho = graded_radii(N, v)
    if not 0 <= k < N:
        raise ValueError(f"layer index {k} outside 0..{N - 1}")
    part = _assemble(_independent_blocks(rho, l, [M] * N, layers=[k]), rho, l, "independent", [M] * N)
    return [part.cell(i) for i in range(part.n_cells)]


# ---------------------------------------------------------------------------
# schedules

SCHEDULES = ("thm31", "thm31_lb", "thm33", "thm34", "thm36", "thm39", "uniform")


def regime(v: float, l: int) -> str:
    """``'below'``, ``'critical'`` or ``'above'`` according to v versus l/(l-1)."""
    if l < 2:
        return "below"
    crit = l / (l - 1)
    if abs(v - crit) <= 1e-12 * crit:
        return "critical"
    return "below" if v < crit else "above"


def schedule_ld(spec: FunctionClassSpec, derived: DerivedParams | None, N: int, theorem: str) -> list[int]:
    """Subdivision counts ``M_0..M_{N-1}`` for the multivariate constructions.

    ``thm31``     upper bound, barred classes, v <= l/(l-1):
                  ``M_0 = ceil(ln(N)**(u/r))``, ``M_k = ceil(ln(N/k)**((u-1)/s))``
    ``thm31_lb``  lower-bound bumps, same classes: exponent ``(u-1)/s`` for all k
    ``thm33``     v > l/(l-1): no subdivision
    ``thm34``     Q_u classes, v <= l/(l-1):
                  ``M_0 = ceil(ln(N)**(u/(r+1-mu)))``, ``M_k = ceil(ln(N/k)**(u/s))``
    ``thm36``     Q_u lower-bound bumps at v = l/(l-1): exponent ``u/s`` for all k
    ``thm39``     Q_u, v > l/(l-1): no subdivision
    ``uniform``   all ones, no regime check
    """
    if derived is None:
        derived = derive_params(spec)
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if theorem not in SCHEDULES:
        raise ValueError(f"unknown schedule {theorem!r}; choose from {SCHEDULES}")
    reg = regime(derived.v, spec.l)
    is_qu = spec.kind is ClassKind.Q_u
    r, u, s, mu = spec.r, spec.u, derived.s, derived.mu

    def need(ok: bool, what: str):
        if not ok:
            raise ValueError(f"schedule {theorem} requires {what} (v={derived.v:.6g}, l={spec.l}, kind={spec.kind.value})")

    if theorem == "uniform":
        return [1] * N
    if theorem in ("thm33", "thm39"):
        need(reg == "above", "v > l/(l-1)")
        need(is_qu == (theorem == "thm39"), "Q_u class" if theorem == "thm39" else "a non-Q_u class")
        return [1] * N
    if theorem in ("thm31", "thm31_lb"):
        need(not is_qu, "a non-Q_u class")
        need(reg != "above", "v <= l/(l-1)")
        e0 = u / r if theorem == "thm31" else (u - 1) / s
        if theorem == "thm31_lb" and u == 1:
            warnings.warn("u=1: lower-bound schedule is all ones", ScheduleWarning, stacklevel=2)
        return [guarded_ceil(log_power(N, e0))] + [
            guarded_ceil(log_power(N / k, (u - 1) / s)) for k in range(1, N)
        ]
    need(is_qu, "a Q_u class")
    if theorem == "thm34":
        need(reg != "above", "v <= l/(l-1)")
        return [guarded_ceil(log_power(N, u / (r + 1 - mu)))] + [
            guarded_ceil(log_power(N / k, u / s)) for k in range(1, N)
        ]
    need(reg == "critical", "v = l/(l-1)")
    return [guarded_ceil(log_power(N, u / s))] + [
        guarded_ceil(log_power(N / k, u / s)) for k in range(1, N)
    ]


# ---------------------------------------------------------------------------
# partitions


@dataclass
class PartitionLD:
    N: int
    l: int
    rho: np.ndarray
    variant: str
    schedule: tuple
    schedule_id: str
    blocks: list
    lo: np.ndarray
    hi: np.ndarray
    layer: np.ndarray
    iid: np.ndarray
    jid: np.ndarray
    _layer_blocks: dict = field(default_factory=dict, repr=False)

    @property
    def n_cells(self) -> int:
        return len(self.lo)

    @property
    def w(self) -> np.ndarray:
        return 1.0 - self.rho

    @property
    def h(self) -> np.ndarray:
        return layer_widths(self.rho)

    @property
    def central(self) -> Block:
        return self.blocks[-1]

    def cell(self, i: int) -> Cell:
        return Cell(tuple(map(float, self.lo[i])), tuple(map(float, self.hi[i])),
                    int(self.layer[i]), tuple(map(int, self.iid[i])), tuple(map(int, self.jid[i])))

    def cells(self):
        for i in range(self.n_cells):
            yield self.cell(i)

    def volumes(self) -> np.ndarray:
        return np.prod(self.hi - self.lo, axis=1)

    def locate(self, pts, layer: int | None = None) -> np.ndarray:
        """Cell id of each point.

        The layer comes from ``max|t_i|`` (ties to the lower layer) unless
        ``layer`` forces one, then the first block in precedence order whose
        closed box holds the point, then a per-axis binary search (ties to the
        lower cell).
        """
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[1] != self.l:
            raise ValueError(f"expected points of dimension {self.l}")
        if np.any(np.abs(pts) > 1.0) or np.any(np.isnan(pts)):
            raise ValueError("points must lie in the cube")
        if layer is None:
            lay = _layer_of_sup(np.max(np.abs(pts), axis=1), self.rho)
        else:
            lay = np.full(len(pts), int(layer))
        out = np.full(len(pts), -1, dtype=np.int64)
        for k in np.unique(lay):
            sel = np.flatnonzero(lay == k)
            for b in self._layer_blocks[int(k)]:
                if len(sel) == 0:
                    break
                p = pts[sel]
                inside = np.all((p >= b.lo) & (p <= b.hi), axis=1)
                if not inside.any():
                    continue
                ids = sel[inside]
                p = p[inside]
                idx = []
                for d, e in enumerate(b.edges):
                    q = np.searchsorted(e, p[:, d], side="left") - 1
                    idx.append(np.clip(q, 0, len(e) - 2))
                out[ids] = b.lookup[tuple(idx)]
                sel = sel[~inside]
        if np.any(out < 0):
            raise RuntimeError("point location failed; partition does not cover the cube")
        return out


def _independent_blocks(rho, l, M, layers=None, whole_core=False):
    N = len(rho) - 1
    w = 1.0 - rho
    h = layer_widths(rho)
    layers = range(N) if layers is None else layers
    blocks = []
    for k in layers:
        if k < N - 1:
            blocks += _slab_blocks(k, w[k], w[k + 1], h[k], M[k], l)
        else:
            blocks.append(_core_block(k, w[k], h[k], M[k], l, whole=whole_core))
    return blocks


def _assemble(blocks, rho, l, variant, schedule, schedule_id="") -> PartitionLD:
    lo, hi, lay, iid, jid = [], [], [], [], []
    offset = 0
    layer_blocks: dict = {}
    for b in blocks:
        grids = np.meshgrid(*[np.arange(n) for n in b.shape], indexing="ij")
        q = np.stack([g.ravel() for g in grids], axis=1)  # C order
        n = len(q)
        lookup = np.arange(offset, offset + n, dtype=np.int64).reshape(b.shape)
        b.offset, b.lookup = offset, lookup
        lo.append(np.stack([b.edges[d][q[:, d]] for d in range(l)], axis=1))
        hi.append(np.stack([b.edges[d][q[:, d] + 1] for d in range(l)], axis=1))
        lay.append(np.full(n, b.layer))
        iid.append(q // b.M)
        jid.append(q % b.M)
        offset += n
        layer_blocks.setdefault(b.layer, []).append(b)
    return PartitionLD(
        N=len(rho) - 1, l=l, rho=rho, variant=variant, schedule=tuple(schedule),
        schedule_id=schedule_id, blocks=list(blocks),
        lo=np.concatenate(lo), hi=np.concatenate(hi), layer=np.concatenate(lay),
        iid=np.concatenate(iid).astype(np.int64), jid=np.concatenate(jid).astype(np.int64),
        _layer_blocks=layer_blocks,
    )


def _check_inputs(l: int, schedule, N: int):
    if l < 2:
        raise ValueError("multivariate partitions need l >= 2")
    if len(schedule) != N:
        raise ValueError(f"schedule has {len(schedule)} entries, expected N={N}")
    if any(int(m) != m or m < 1 for m in schedule):
        raise ValueError("schedule entries must be positive integers")


def decompose_domain(N: int, v: float, l: int, schedule: Sequence[int] | None = None,
                     rho: np.ndarray | None = None, schedule_id: str = "",
                     whole_core: bool = False) -> PartitionLD:
    """Independent construction (cells of different slabs need not conform).

    ``rho`` overrides the graded radii (``N`` and ``v`` are then ignored
    except for validation).  The central cube is gridded like the frames
    unless ``whole_core`` keeps it as a single cell.
    """
    rho = graded_radii(N, v) if rho is None else np.asarray(rho, dtype=float)
    N = len(rho) - 1
    schedule = [1] * N if schedule is None else list(schedule)
    _check_inputs(l, schedule, N)
    blocks = _independent_blocks(rho, l, schedule, whole_core=whole_core)
    return _assemble(blocks, rho, l, "independent", schedule, schedule_id)


def _refine(breaks: np.ndarray, hstar: float) -> np.ndarray:
    # pieces of length >= 2h* are split into about floor(L/h*) equal parts, each in
    # [h*, 2h*); the 1e-9 margin keeps rounded pieces from dipping below h*
    parts = [breaks[:1]]
    for a, b in zip(breaks[:-1], breaks[1:]):
        t = (b - a) / hstar
        p = max(int(t * (1.0 - 1e-9)), int(t / 2.0) + 1) if t >= 2.0 else 1
        parts.append(_equal_split(a, b, max(p, 1))[1:])
    return np.concatenate(parts)


def decompose_domain_aligned(N: int, v: float, l: int, schedule: Sequence[int] | None = None,
                             rho: np.ndarray | None = None, schedule_id: str = "") -> PartitionLD:
    """Vertex-aligned construction, outward from the central cube (kept whole)."""
    rho = graded_radii(N, v) if rho is None else np.asarray(rho, dtype=float)
    N = len(rho) - 1
    schedule = [1] * N if schedule is None else list(schedule)
    _check_inputs(l, schedule, N)
    w = 1.0 - rho
    h = layer_widths(rho)
    c = w[N - 1]
    core = np.array([-c, c])
    layers = [[Block(N - 1, "core", (core,) * l, (core,) * l, 1)]]
    breaks = core
    for k in range(N - 2, -1, -1):
        M = schedule[k]
        mid = _refine(breaks, h[k] / M)
        low = _equal_split(-w[k], -w[k + 1], M)
        high = _equal_split(w[k + 1], w[k], M)
        mid[0], mid[-1] = low[-1], high[0]
        breaks = np.concatenate([low, mid[1:-1], high])
        layers.append(_face_slabs(k, mid, low, high, breaks, 1, l))
    blocks = [b for layer in reversed(layers) for b in layer]
    return _assemble(blocks, rho, l, "aligned", schedule, schedule_id)


# ---------------------------------------------------------------------------
# counting and validation


def count_cells(partition: PartitionLD, v: float | None = None) -> tuple[int, float]:
    """Cell count ``n`` and ``n`` divided by the regime's growth term.

    The term is ``N**(v(l-1))`` above the critical exponent, ``N**l`` below it
    and ``N**l ln N`` at it.
    """
    N, l = partition.N, partition.l
    if v is None:
        # recover v from the graded radii: rho_1 = N**-v
        v = -math.log(partition.rho[1]) / math.log(N)
    reg = regime(v, l)
    if reg == "above":
        term = N ** (v * (l - 1))
    elif reg == "below":
        term = float(N) ** l
    else:
        term = float(N) ** l * math.log(N)
    n = partition.n_cells
    return n, n / term


def check_volume(partition: PartitionLD) -> float:
    """Relative deviation of the total cell volume from ``2**l``."""
    total = math.fsum(partition.volumes())
    return abs(total - 2.0 ** partition.l) / 2.0 ** partition.l


def _window_violations(lengths, lower, upper):
    bad = []
    # relative slack, plus a few ulps of a unit coordinate: equal splits of a
    # band near the cube boundary cannot all be exactly h*/M in floating point
    lo_q = Fraction(lower) * (1 - Fraction(_REL_TOL)) - Fraction(_ABS_TOL)
    up_q = Fraction(upper)
    lengths = np.asarray(lengths, dtype=float)
    for L in np.unique(lengths):
        q = Fraction(float(L))
        if q < lo_q or q >= up_q:
            bad.append(float(L))
    return bad


def check_edge_window(partition: PartitionLD) -> list[tuple]:
    """Edges outside their window; an empty list means the check passed.

    Independent partitions: parent (pre-subdivision) edges of layer k must
    lie in ``[h_k, 2h_k)``.  Aligned partitions have no parent level; there
    every cell edge of layer k must lie in ``[h*_k, 2h*_k)`` with
    ``h*_k = h_k / M_k``.  The whole central cell (edge ``2 h_{N-1}``) is
    exempt.  ``h_k`` is taken exactly from the stored layer boundaries
    ``w_k - w_{k+1}``; the lower bound gets a relative slack of 1e-12 and an
    absolute slack of four unit roundoffs.
    """
    w = [Fraction(float(x)) for x in partition.w] + [Fraction(0)]
    h = [w[k] - w[k + 1] for k in range(partition.N)]
    out = []
    for b in partition.blocks:
        k = b.layer
        if b.tag == "core" and len(b.parents[0]) == 2:
            continue
        if partition.variant == "aligned":
            lower = h[k] / partition.schedule[k]
            lengths = np.concatenate([np.diff(e) for e in b.edges])
        else:
            lower = h[k]
            lengths = np.concatenate([np.diff(e) for e in b.parents])
        for L in _window_violations(lengths, lower, 2 * lower):
            out.append((k, b.tag, L, lower))
    return out


def _surface_vertices(partition: PartitionLD, sel: np.ndarray, radius: float) -> set:
    lo, hi = partition.lo[sel], partition.hi[sel]
    l = partition.l
    verts = set()
    for corner in np.ndindex(*(2,) * l):
        pts = np.where(np.array(corner, dtype=bool), hi, lo)
        on = np.max(np.abs(pts), axis=1) == radius
        verts.update(map(tuple, pts[on]))
    return verts


def check_vertex_nesting(partition: PartitionLD) -> list[int]:
    """Layers ``k`` where some vertex of layer ``k+1`` on their common surface is missing from layer ``k``."""
    w = partition.w
    bad = []
    for k in range(partition.N - 1):
        inner = _surface_vertices(partition, partition.layer == k + 1, w[k + 1])
        outer = _surface_vertices(partition, partition.layer == k, w[k + 1])
        if not inner <= outer:
            bad.append(k)
    return bad


def _pairs_touching(lo, hi, chunk=2048):
    """Index pairs of boxes whose closures intersect, via a sweep along axis 0."""
    order = np.argsort(lo[:, 0], kind="stable")
    slo, shi = lo[order], hi[order]
    ends = np.searchsorted(slo[:, 0], shi[:, 0], side="right")
    n = len(lo)
    for c0 in range(0, n, chunk):
        ii = np.arange(c0, min(n, c0 + chunk))
        cnt = np.maximum(ends[ii] - ii - 1, 0)
        total = int(cnt.sum())
        if total == 0:
            continue
        rep_i = np.repeat(ii, cnt)
        within = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        rep_j = rep_i + 1 + within
        ok = np.all((slo[rep_i] <= shi[rep_j]) & (slo[rep_j] <= shi[rep_i]), axis=1)
        yield order[rep_i[ok]], order[rep_j[ok]]


def _overlap_pairs_1d(ea: np.ndarray, eb: np.ndarray) -> int:
    # pairs of intervals [ea[i], ea[i+1]], [eb[j], eb[j+1]] with positive overlap
    first = np.searchsorted(eb[1:], ea[:-1], side="right")
    last = np.searchsorted(eb[:-1], ea[1:], side="left")
    return int(np.sum(np.maximum(last - first, 0)))


def check_disjoint(partition: PartitionLD) -> int:
    """Number of cell pairs whose interiors overlap (0 for a valid partition).

    Cells come in tensor-grid blocks, so for two blocks the count factorizes
    into per-axis counts of overlapping interval pairs.  A block whose edge
    arrays are not strictly increasing contributes its degenerate cells.
    """
    blocks = partition.blocks
    bad = 0
    for b in blocks:
        for e in b.edges:
            bad += int(np.count_nonzero(np.diff(e) <= 0))
    for a in range(len(blocks)):
        ea = blocks[a].edges
        for c in range(a + 1, len(blocks)):
            eb = blocks[c].edges
            n = 1
            for d in range(partition.l):
                n *= _overlap_pairs_1d(ea[d], eb[d])
                if n == 0:
                    break
            bad += n
    return bad


def check_conformity(partition: PartitionLD) -> int:
    """Number of face-adjacent cell pairs whose shared face is a full face of neither cell."""
    lo, hi = partition.lo, partition.hi
    l = partition.l
    bad = 0
    for i, j in _pairs_touching(lo, hi):
        ov_lo = np.maximum(lo[i], lo[j])
        ov_hi = np.minimum(hi[i], hi[j])
        ext = ov_hi - ov_lo
        face = (np.sum(ext == 0, axis=1) == 1) & (np.sum(ext > 0, axis=1) == l - 1)
        if not face.any():
            continue
        i, j, ov_lo, ov_hi, ext = i[face], j[face], ov_lo[face], ov_hi[face], ext[face]
        tang = ext > 0
        full_i = np.all(~tang | ((ov_lo == lo[i]) & (ov_hi == hi[i])), axis=1)
        full_j = np.all(~tang | ((ov_lo == lo[j]) & (ov_hi == hi[j])), axis=1)
        bad += int(np.count_nonzero(~(full_i | full_j)))
    return bad


# ---------------------------------------------------------------------------
# text dump


def dump_partition(partition: PartitionLD, path_or_file) -> None:
    """One line per cell: ``k i1,..,il j1,..,jl a1 b1 ... al bl`` (17 significant digits)."""
    lines = []
    for c in range(partition.n_cells):
        coords = " ".join(
            f"{partition.lo[c, d]:.17g} {partition.hi[c, d]:.17g}" for d in range(partition.l)
        )
        lines.append(
            f"{partition.layer[c]} {','.join(map(str, partition.iid[c]))} "
            f"{','.join(map(str, partition.jid[c]))} {coords}\n"
        )
    text = "".join(lines)
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w") as fh:
            fh.write(text)


def read_partition_dump(path_or_file) -> list[Cell]:
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
    else:
        with open(path_or_file) as fh:
            text = fh.read()
    cells = []
    for ln, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        try:
            k = int(parts[0])
            iid = tuple(int(x) for x in parts[1].split(","))
            jid = tuple(int(x) for x in parts[2].split(","))
            nums = [float(x) for x in parts[3:]]
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {ln}: malformed cell record") from exc
        if len(nums) != 2 * len(iid):
            raise ValueError(f"line {ln}: expected {2 * len(iid)} coordinates, got {len(nums)}")
        cells.append(Cell(tuple(nums[0::2]), tuple(nums[1::2]), k, iid, jid))
    return cells
