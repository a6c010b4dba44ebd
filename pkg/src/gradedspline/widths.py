"""Bump families behind the width lower bounds.

Each bump lives on one cell ``[a, b]`` of a boundary-layer partition::

    phi(t) = A * prod_i ((t_i - a_i)(b_i - t_i))**s / H**((2l - 1)s) * weight

It vanishes on the cell boundary and outside, and is positive inside.  The
amplitude ``A`` is fixed so that every order-``s`` derivative stays below a
layer-dependent bound equal to ``weight``.  The smallest peak value over the
family, ``eps_N``, is the amplitude a sign pattern can be forced with.

What is checked here is the premise of the width argument (bounded
derivatives, disjoint supports, prescribed signs), not a certified value of
the width itself.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from ._numeric import log_power
from .classes import ClassKind, FunctionClassSpec, derive_params, multi_indices
from .mesh1d import ScheduleWarning
from .mesh_ld import PartitionLD, decompose_domain, graded_radii, regime, schedule_ld

__all__ = [
    "Bump",
    "BumpFamily",
    "RhoMesh",
    "bump_layer",
    "bump_interior",
    "calibrate_amplitude",
    "derivative_factor_max",
    "rho_sequence",
    "rho_radii",
    "build_bump_family",
    "lower_bound_estimate",
    "sign_pattern_check",
    "SignPatternRecord",
    "WIDTH_THEOREMS",
]

WIDTH_THEOREMS = ("thm31", "thm32", "thm36", "thm38")


@lru_cache(maxsize=None)
def _profile(s: int) -> Polynomial:
    # (y (1 - y))**s on the reference interval
    return Polynomial([0.0, 1.0, -1.0]) ** s


@lru_cache(maxsize=None)
def derivative_factor_max(s: int, j: int) -> float:
    """``max_{y in [0,1]} |d^j/dy^j (y(1-y))**s|`` from the critical points."""
    p = _profile(s).deriv(j) if j else _profile(s)
    cand = [0.0, 1.0, 0.5]
    dp = p.deriv()
    if dp.degree() > 0:
        for z in dp.roots():
            if abs(z.imag) < 1e-12 and 0.0 <= z.real <= 1.0:
                cand.append(float(z.real))
    return float(max(abs(p(x)) for x in cand))


def _order_s_max(edges, s: int) -> float:
    """Max over ``|v| = s`` of ``max |D^v prod_i ((t_i-a_i)(b_i-t_i))**s|`` on the cell.

    With ``e_i = b_i - a_i`` the factor along axis i is ``e_i**(2s) q(y)``,
    so a ``j``-th derivative peaks at ``e_i**(2s - j) * max|q^(j)|``.
    """
    l = len(edges)
    best = 0.0
    for v in multi_indices(l, s, s):
        val = 1.0
        for e, j in zip(edges, v):
            val *= e ** (2 * s - j) * derivative_factor_max(s, j)
        best = max(best, val)
    return best


@dataclass(frozen=True)
class Bump:
    lo: tuple
    hi: tuple
    s: int
    A: float
    H: float
    weight: float = 1.0

    @property
    def l(self) -> int:
        return len(self.lo)

    @property
    def scale(self) -> float:
        """Coefficient in front of the product polynomial."""
        return self.A * self.weight / self.H ** ((2 * self.l - 1) * self.s)

    def __call__(self, t):
        t = np.atleast_2d(np.asarray(t, dtype=float))
        lo, hi = np.array(self.lo), np.array(self.hi)
        inside = np.all((t >= lo) & (t <= hi), axis=1)
        prod = np.prod(np.clip((t - lo) * (hi - t), 0.0, None), axis=1) ** self.s
        return np.where(inside, self.scale * prod, 0.0)

    def derivative(self, t, v) -> np.ndarray:
        """Exact ``D^v phi`` inside the cell (zero outside)."""
        t = np.atleast_2d(np.asarray(t, dtype=float))
        out = np.full(len(t), self.scale)
        inside = np.ones(len(t), dtype=bool)
        for d, j in enumerate(v):
            a, b = self.lo[d], self.hi[d]
            p = (Polynomial([-a, 1.0]) * Polynomial([b, -1.0])) ** self.s
            out = out * p.deriv(j)(t[:, d]) if j else out * p(t[:, d])
            inside &= (t[:, d] >= a) & (t[:, d] <= b)
        return np.where(inside, out, 0.0)

    def peak(self) -> float:
        e = np.array(self.hi) - np.array(self.lo)
        return float(self.scale * np.prod((e * e / 4.0) ** self.s))


def calibrate_amplitude(lo, hi, s: int, H: float, bound_over_weight: float = 1.0) -> float:
    """Largest ``A`` with ``|D^v phi| <= bound`` for every ``|v| = s``.

    ``bound_over_weight`` is the constraint divided by the bump's weight
    factor (1 for all built-in families, where the two coincide).
    """
    edges = np.asarray(hi, dtype=float) - np.asarray(lo, dtype=float)
    l = len(edges)
    return bound_over_weight * H ** ((2 * l - 1) * s) / _order_s_max(edges, s)


def bump_layer(lo, hi, k: int, N: int, v: float, s: int, M: int, gamma: float,
               u: int = 1, log_power_u: int | None = None) -> Bump:
    """Layer bump with weight ``(1 + |ln(((k+1)/N)**v)|**p) / ((k+1)/N)**(v gamma)``.

    ``p`` defaults to ``u - 1`` (barred classes); pass ``log_power_u=u`` for
    the Q_u variant.  ``H = h_k / M``.
    """
    rho = graded_radii(N, v)
    H = (rho[k + 1] - rho[k]) / M
    p = u - 1 if log_power_u is None else log_power_u
    x = ((k + 1) / N) ** v
    weight = (1.0 + abs(math.log(x)) ** p if p else 2.0) / x ** (v * gamma)
    A = calibrate_amplitude(lo, hi, s, H)
    return Bump(tuple(lo), tuple(hi), s, A, H, weight)


def bump_interior(lo, hi, s: int, H: float) -> Bump:
    """Central bump with unit weight and unit derivative bound; ``H`` is the central layer width."""
    return Bump(tuple(lo), tuple(hi), s, calibrate_amplitude(lo, hi, s, H), H, 1.0)


# ---------------------------------------------------------------------------
# rho mesh


@dataclass(frozen=True)
class RhoMesh:
    """Radii ``rho_0 = N**-v < rho_1 < ... < rho_m <= 1`` with
    ``(rho_k - rho_{k-1})**s / rho_k**gamma = N**-s ln(N)**(u-1)``."""

    N: int
    s: int
    gamma: float
    u: int
    rho: np.ndarray
    target: float
    residuals: np.ndarray

    @property
    def m(self) -> int:
        return len(self.rho) - 1

    @property
    def max_relative_residual(self) -> float:
        return float(np.max(np.abs(self.residuals)) / self.target) if len(self.residuals) else 0.0


def _solve_step(prev: float, s: int, gamma: float, target: float) -> float:
    g = lambda r: (r - prev) ** s / r**gamma - target
    lo = prev
    step = max(prev, target ** (1.0 / s))
    hi = prev + step
    while g(hi) < 0:
        step *= 2.0
        hi = prev + step
    # bisect until the bracket stops shrinking in floating point
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(g(lo)) < abs(g(hi)) else hi


def rho_sequence(N: int, s: int, gamma: float, u: int = 1) -> RhoMesh:
    if int(N) != N or N < 2:
        raise ValueError("N must be an integer >= 2")
    v = s / (s - gamma)
    target = N ** (-s) * log_power(N, u - 1)
    if not target > 0:
        raise ValueError("target N**-s ln(N)**(u-1) must be positive")
    rho = [N ** (-v)]
    res = []
    while True:
        nxt = _solve_step(rho[-1], s, gamma, target)
        if nxt > 1.0:
            break
        res.append((nxt - rho[-1]) ** s / nxt**gamma - target)
        rho.append(nxt)
        if nxt == 1.0:
            break
    return RhoMesh(N, s, gamma, u, np.array(rho), target, np.array(res))


def rho_radii(mesh: RhoMesh) -> np.ndarray:
    """Partition radii ``[0, rho_0, ..., rho_m, 1]``.

    The trailing region ``rho_m <= d <= 1`` becomes the central cube.  When its
    half-width ``1 - rho_m`` is smaller than the last layer width it is merged
    into that layer, so the central cube keeps edges no shorter than the frame
    around it.
    """
    r = list(mesh.rho)
    if r[-1] < 1.0:
        if len(r) >= 2 and 1.0 - r[-1] < r[-1] - r[-2]:
            r.pop()
        r.append(1.0)
    return np.array([0.0] + r)


# ---------------------------------------------------------------------------
# families


@dataclass
class BumpFamily:
    theorem: str
    spec: FunctionClassSpec
    N: int
    partition: PartitionLD
    s: int
    A: np.ndarray
    H: np.ndarray
    weight: np.ndarray
    bound: np.ndarray

    @property
    def n(self) -> int:
        return self.partition.n_cells

    def bump(self, i: int) -> Bump:
        p = self.partition
        return Bump(tuple(p.lo[i]), tuple(p.hi[i]), self.s, float(self.A[i]), float(self.H[i]),
                    float(self.weight[i]))

    def peaks(self) -> np.ndarray:
        p = self.partition
        e = p.hi - p.lo
        scale = self.A * self.weight / self.H ** ((2 * p.l - 1) * self.s)
        return scale * np.prod((e * e / 4.0) ** self.s, axis=1)

    @property
    def eps(self) -> float:
        return float(np.min(self.peaks()))

    def compliance(self, q: int = 33) -> float:
        """Worst sampled ``|D^v phi| / bound`` over ``|v| = s`` on a ``q**l`` grid per cell.

        Cells with identical edge lengths share the polynomial shape, so the
        derivative table is computed once per distinct shape.
        """
        p = self.partition
        edges = np.round(p.hi - p.lo, 15)
        shapes, inv = np.unique(edges, axis=0, return_inverse=True)
        inv = inv.ravel()
        ratio_scale = self.A * self.weight / self.H ** ((2 * p.l - 1) * self.s) / self.bound
        worst = 0.0
        y = np.linspace(0.0, 1.0, q)
        for si, e in enumerate(shapes):
            sel = inv == si
            best = 0.0
            for v in multi_indices(p.l, self.s, self.s):
                val = 1.0
                for d, j in enumerate(v):
                    poly = (Polynomial([0.0, 1.0]) * Polynomial([e[d], -1.0])) ** self.s
                    vals = poly.deriv(j)(y * e[d]) if j else poly(y * e[d])
                    val *= np.max(np.abs(vals))
                best = max(best, val)
            worst = max(worst, best * float(np.max(ratio_scale[sel])))
        return worst


def _check_theorem(spec: FunctionClassSpec, theorem: str, v: float):
    if theorem not in WIDTH_THEOREMS:
        raise ValueError(f"unknown theorem tag {theorem!r}; choose from {WIDTH_THEOREMS}")
    reg = regime(v, spec.l)
    qu = spec.kind is ClassKind.Q_u
    want_qu = theorem in ("thm36", "thm38")
    if qu != want_qu:
        raise ValueError(f"{theorem} needs {'a Q_u' if want_qu else 'a non-Q_u'} class")
    want = "critical" if theorem in ("thm31", "thm36") else "above"
    if reg != want:
        raise ValueError(f"{theorem} needs v {'= l/(l-1)' if want == 'critical' else '> l/(l-1)'}; got v={v:.6g}, l={spec.l}")


def build_bump_family(spec: FunctionClassSpec, N: int, theorem: str) -> BumpFamily:
    """Bump family on the partition used by the given lower-bound construction.

    ``thm31``/``thm36`` (v = l/(l-1)): graded layers subdivided by ``M_k``;
    weights ``(1 + |ln((k+1)/N)**v|**p) / ((k+1)/N)**(v gamma)`` with
    ``p = u-1`` resp. ``u``.  For ``thm31`` the central cube carries a
    single bump with unit bound.
    ``thm32``/``thm38`` (v > l/(l-1)): layers from :func:`rho_sequence`, no
    subdivision; weight ``N**(v gamma) ln(N)**(u-1)`` (``ln(N)**u`` for
    ``thm38``) on the outer layer and ``rho_k**-gamma`` further in.
    """
    d = derive_params(spec)
    _check_theorem(spec, theorem, d.v)
    s, v, gamma, u, l = d.s, d.v, spec.gamma, spec.u, spec.l
    if theorem in ("thm31", "thm36"):
        with warnings.catch_warnings():
            # all-ones schedule for u=1 is expected here
            warnings.simplefilter("ignore", ScheduleWarning)
            M = schedule_ld(spec, d, N, "thm31_lb" if theorem == "thm31" else "thm36")
        part = decompose_domain(N, v, l, M, whole_core=theorem == "thm31",
                                schedule_id=theorem)
        rho = part.rho
        k = part.layer
        H = (rho[k + 1] - rho[k]) / np.asarray(M)[k]
        x = ((k + 1) / N) ** v
        p = u - 1 if theorem == "thm31" else u
        logf = np.abs(np.log(x)) ** p if p else np.ones_like(x)
        weight = (1.0 + logf) / x ** (v * gamma)
        if theorem == "thm31":
            core = k == N - 1
            weight[core] = 1.0
    else:
        mesh = rho_sequence(N, s, gamma, u)
        rho = rho_radii(mesh)
        part = decompose_domain(N, v, l, rho=rho, whole_core=True, schedule_id=theorem)
        k = part.layer
        H = rho[k + 1] - rho[k]
        weight = 1.0 / rho[k + 1] ** gamma
        lp = log_power(N, u - 1 if theorem == "thm32" else u)
        weight[k == 0] = N ** (v * gamma) * lp
    bound = weight.copy()
    e = part.hi - part.lo
    A = np.array([H[i] ** ((2 * l - 1) * s) / _order_s_max(e[i], s) for i in range(part.n_cells)])
    return BumpFamily(theorem, spec, N, part, s, A, H, weight, bound)


def lower_bound_estimate(spec: FunctionClassSpec, N: int, theorem: str | None = None):
    """Return ``(n, eps_N, family)``: bump count, smallest peak, and the family itself."""
    d = derive_params(spec)
    if theorem is None:
        reg = regime(d.v, spec.l)
        qu = spec.kind is ClassKind.Q_u
        theorem = {("critical", False): "thm31", ("above", False): "thm32",
                   ("critical", True): "thm36", ("above", True): "thm38"}.get((reg, qu))
        if theorem is None:
            raise ValueError(f"no bump construction for v={d.v:.6g} < l/(l-1)")
    fam = build_bump_family(spec, N, theorem)
    return fam.n, fam.eps, fam


@dataclass(frozen=True)
class SignPatternRecord:
    ok: bool
    n: int
    eps: float
    min_ratio: float  # min over nonzero C of |xi(center)| / (eps |C|)
    sign_mismatches: int
    boundary_max: float  # largest |phi| found on a cell boundary


def sign_pattern_check(family: BumpFamily, coefficients) -> SignPatternRecord:
    """Evaluate ``xi = sum C_i phi_i`` at every cell centre and compare signs and sizes."""
    C = np.asarray(coefficients, dtype=float)
    if C.shape != (family.n,):
        raise ValueError(f"expected {family.n} coefficients")
    if np.any(np.abs(C) > 1.0):
        raise ValueError("coefficients must satisfy |C| <= 1")
    p = family.partition
    centres = 0.5 * (p.lo + p.hi)
    owner = p.locate(centres)
    # every other bump vanishes at a centre it does not own; evaluate the owner
    # and one face neighbour along each axis to confirm
    xi = np.zeros(family.n)
    peaks = family.peaks()
    scale = peaks / np.prod(((p.hi - p.lo) ** 2 / 4.0) ** family.s, axis=1)
    vals = scale[owner] * np.prod(np.clip((centres - p.lo[owner]) * (p.hi[owner] - centres), 0, None),
                                  axis=1) ** family.s
    xi += C[owner] * vals
    boundary = 0.0
    for d in range(p.l):
        probe = centres.copy()
        probe[:, d] = p.hi[:, d]
        inside = np.all((probe >= p.lo) & (probe <= p.hi), axis=1)
        prod = np.prod(np.clip((probe - p.lo) * (p.hi - probe), 0, None), axis=1) ** family.s
        boundary = max(boundary, float(np.max(np.where(inside, scale * prod, 0.0))))
    nz = C != 0
    mism = int(np.count_nonzero(np.sign(xi[nz]) != np.sign(C[nz]))) + int(np.count_nonzero(xi[~nz] != 0))
    eps = family.eps
    ratio = float(np.min(np.abs(xi[nz]) / (eps * np.abs(C[nz])))) if nz.any() else math.inf
    ok = mism == 0 and ratio >= 1.0 - 1e-12 and boundary == 0.0
    return SignPatternRecord(ok, family.n, eps, ratio, mism, boundary)
