"""Function classes with boundary singularities on the cube [-1, 1]^l.

A class is described by :class:`FunctionClassSpec`; the exponents that drive
every construction downstream (approximation order ``s``, grading exponent
``v`` and the fractional parts ``zeta``/``mu``) come from :func:`derive_params`.

The module also ships a small set of explicit class members.  Each is a
product ``g(t_1) * ... * g(t_l)`` of a one-dimensional prototype ``g`` whose
derivatives are available in closed form, so derivative bounds can be checked
numerically by :func:`check_membership`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "ClassKind",
    "ClassSpecError",
    "FunctionClassSpec",
    "DerivedParams",
    "derive_params",
    "distance_to_boundary",
    "LogPowerPrototype",
    "PolynomialPrototype",
    "SingularFunction",
    "test_function",
    "FAMILIES",
    "ProbeGrid",
    "default_probe_grid",
    "MembershipReport",
    "check_membership",
    "growth_profile",
    "multi_indices",
]

_INT_TOL = 1e-12


class ClassKind(str, Enum):
    Q_r = "Q_r"
    Q_rgamma = "Q_rgamma"
    barQ_u = "barQ_u"
    Q_u = "Q_u"


class ClassSpecError(ValueError):
    """Invalid class parameters.  ``code`` is a short machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) <= _INT_TOL


@dataclass(frozen=True)
class FunctionClassSpec:
    kind: ClassKind
    r: int
    gamma: float = 1.0
    u: int = 1
    l: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassKind(self.kind))
        if int(self.r) != self.r or self.r < 1:
            raise ClassSpecError("bad-r", f"r must be a positive integer, got {self.r}")
        if int(self.u) != self.u or self.u < 1:
            raise ClassSpecError("bad-u", f"u must be a positive integer, got {self.u}")
        if int(self.l) != self.l or self.l < 1:
            raise ClassSpecError("bad-l", f"l must be a positive integer, got {self.l}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "u", int(self.u))
        object.__setattr__(self, "l", int(self.l))
        if self.kind is ClassKind.Q_r:
            # Q_r is Q_{r,gamma} with ceil(gamma) = r + 1 and zeta = 0.
            object.__setattr__(self, "gamma", float(self.r + 1))
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or gamma <= 0:
            raise ClassSpecError("bad-gamma", f"gamma must be positive, got {self.gamma}")
        if self.kind is ClassKind.barQ_u and not _is_integer(gamma):
            raise ClassSpecError(
                "gamma-not-integer", f"barQ_u requires an integer gamma, got {gamma}"
            )
        if self.kind is ClassKind.Q_u and _is_integer(gamma):
            raise ClassSpecError(
                "gamma-integer", f"Q_u requires a non-integer gamma, got {gamma}"
            )
        if _is_integer(gamma):
            gamma = float(round(gamma))
        object.__setattr__(self, "gamma", gamma)

    def with_dim(self, l: int) -> "FunctionClassSpec":
        return FunctionClassSpec(self.kind, self.r, self.gamma, self.u, l)


@dataclass(frozen=True)
class DerivedParams:
    s: int
    v: float
    zeta: float
    mu: float


def _ceil_gamma(gamma: float) -> int:
    if _is_integer(gamma):
        return int(round(gamma))
    return math.ceil(gamma)


def derive_params(spec: FunctionClassSpec) -> DerivedParams:
    """Return ``s``, ``v = s/(s - gamma)``, ``zeta = ceil(gamma) - gamma`` and ``mu = 1 - zeta``."""
    gc = _ceil_gamma(spec.gamma)
    if spec.kind is ClassKind.barQ_u:
        s = spec.r + int(round(spec.gamma))
        zeta = 0.0
    else:
        s = spec.r + gc
        zeta = 0.0 if _is_integer(spec.gamma) else gc - spec.gamma
    v = s / (s - spec.gamma)
    return DerivedParams(s=s, v=v, zeta=zeta, mu=1.0 - zeta)


def distance_to_boundary(t) -> np.ndarray | float:
    """l-infinity distance from ``t`` to the boundary of [-1, 1]^l.

    ``t`` is a scalar (l = 1), a point of shape ``(l,)`` or a batch ``(n, l)``.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0) or not np.all(np.isfinite(arr)):
        raise ValueError("point outside the cube [-1, 1]^l")
    d = 1.0 - np.abs(arr)
    if arr.ndim == 0:
        return float(d)
    if arr.ndim == 1:
        return float(d.min())
    return d.min(axis=-1)


# ---------------------------------------------------------------------------
# one-dimensional prototypes


class PolynomialPrototype:
    """Ordinary polynomial, coefficients in increasing degree."""

    def __init__(self, coeffs: Sequence[float]):
        self.poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))

    def value(self, x):
        return self.poly(np.asarray(x, dtype=float))

    def deriv(self, x, order: int):
        return self.poly.deriv(order)(np.asarray(x, dtype=float)) if order else self.value(x)

    def __repr__(self):
        return f"PolynomialPrototype({list(self.poly.coef)})"


class LogPowerPrototype:
    """``sum_i c_i x^i * w^a * L^u`` with ``w = 1 - x^2`` and ``L = ln(e w / 2)``.

    Derivatives are kept as exact linear combinations of monomials
    ``x^i w^(a-j) L^k`` (keys ``(i, j, k)``), closed under d/dx:

        d(x^i)    = i x^(i-1)
        d(w^e)    = -2 e x w^(e-1)
        d(L^k)    = -2 k x L^(k-1) / w
    """

    def __init__(self, a: float, u: int = 0, poly: Sequence[float] = (1.0,)):
        if a <= 0:
            raise ValueError("power of (1 - x^2) must be positive")
        self.a = float(a)
        self.u = int(u)
        self.poly = tuple(float(c) for c in poly)
        base = {(i, 0, self.u): c for i, c in enumerate(self.poly) if c != 0.0}
        self._terms = [base]

    def terms(self, order: int) -> dict:
        while len(self._terms) <= order:
            self._terms.append(self._differentiate(self._terms[-1]))
        return self._terms[order]

    def _differentiate(self, terms: dict) -> dict:
        out: dict = {}

        def add(key, c):
            out[key] = out.get(key, 0.0) + c

        for (i, j, k), c in terms.items():
            e = self.a - j
            if i > 0:
                add((i - 1, j, k), c * i)
            if e != 0.0:
                add((i + 1, j + 1, k), -2.0 * c * e)
            if k > 0:
                add((i + 1, j + 1, k - 1), -2.0 * c * k)
        return {key: c for key, c in out.items() if c != 0.0}

    def value(self, x):
        return self.deriv(x, 0)

    def deriv(self, x, order: int):
        x = np.asarray(x, dtype=float)
        w = (1.0 - x) * (1.0 + x)
        inside = w > 0.0
        ws = np.where(inside, w, 1.0)
        L = 1.0 + np.log(ws) - math.log(2.0)
        acc = np.zeros_like(x)
        edge = np.zeros_like(x)
        for (i, j, k), c in self.terms(order).items():
            e = self.a - j
            xi = x**i
            acc = acc + c * xi * ws**e * L**k
            # continuous extension at x = +-1
            if e > 0.0:
                continue
            if e == 0.0 and k == 0:
                edge = edge + c * xi
            else:
                edge = edge + np.inf
        return np.where(inside, acc, edge)

    def __repr__(self):
        return f"LogPowerPrototype(a={self.a}, u={self.u}, poly={self.poly})"


@dataclass(frozen=True)
class SingularFunction:
    """Product function ``scale * g(t_1) ... g(t_l)`` with exact partial derivatives."""

    spec: FunctionClassSpec
    family: str
    prototype: object
    scale: float = 1.0

    @property
    def l(self) -> int:
        return self.spec.l

    def _coords(self, t):
        t = np.asarray(t, dtype=float)
        if self.l == 1 and (t.ndim == 0 or t.shape[-1] != 1):
            return t[..., None], t.ndim
        return t, t.ndim - 1

    def __call__(self, t):
        return self.derivative(t, (0,) * self.l)

    def derivative(self, t, v: Sequence[int]):
        v = tuple(int(x) for x in v)
        if len(v) != self.l:
            raise ValueError(f"multi-index {v} does not match dimension {self.l}")
        pts, _ = self._coords(t)
        out = np.full(pts.shape[:-1], self.scale, dtype=float)
        for d in range(self.l):
            out = out * self.prototype.deriv(pts[..., d], v[d])
        return out[()] if out.ndim == 0 else out

    def scaled(self, c: float) -> "SingularFunction":
        return SingularFunction(self.spec, self.family, self.prototype, self.scale * c)

    def normalized(self, grid: "ProbeGrid | None" = None) -> "SingularFunction":
        """Scale by ``1/eps*`` so the function satisfies the class bounds on the probe grid."""
        report = check_membership(self, self.spec, grid)
        return self.scaled(1.0 / report.eps)


def _family_prototype(spec: FunctionClassSpec, family: str):
    d = derive_params(spec)
    r = spec.r
    if family == "Q_rgamma":
        if d.zeta == 0.0:
            # pure integer powers would be reproduced by the local polynomials
            return LogPowerPrototype(r + spec.gamma, 0, (1.0, 1.0 / 3.0))
        return LogPowerPrototype(r + d.zeta, 0)
    if family == "barQ_u":
        return LogPowerPrototype(r, spec.u)
    if family == "Q_u":
        return LogPowerPrototype(r + d.zeta, spec.u)
    raise ClassSpecError("unknown-family", f"unknown family {family!r}")


FAMILIES = {
    "Q_rgamma": {ClassKind.Q_r, ClassKind.Q_rgamma},
    "barQ_u": {ClassKind.barQ_u},
    "Q_u": {ClassKind.Q_u},
}


def test_function(spec: FunctionClassSpec, family: str | None = None) -> SingularFunction:
    """Built-in (unnormalized) member of the class; ``family`` defaults to the natural one."""
    if family is None:
        family = "Q_rgamma" if spec.kind in (ClassKind.Q_r, ClassKind.Q_rgamma) else spec.kind.value
    if family not in FAMILIES:
        raise ClassSpecError("unknown-family", f"unknown family {family!r}")
    if spec.kind not in FAMILIES[family]:
        raise ClassSpecError(
            "incompatible-family", f"family {family!r} is not a member of {spec.kind.value}"
        )
    return SingularFunction(spec, family, _family_prototype(spec, family))


test_function.__test__ = False  # not a pytest test


# ---------------------------------------------------------------------------
# membership checking


def multi_indices(l: int, max_order: int, min_order: int = 0):
    """All multi-indices ``v`` in N^l with ``min_order <= |v| <= max_order``, ordered by |v|."""
    out = []
    for order in range(min_order, max_order + 1):
        for combo in itertools.product(range(order + 1), repeat=l):
            if sum(combo) == order:
                out.append(combo)
    return out


@dataclass(frozen=True)
class ProbeGrid:
    points: np.ndarray
    description: str

    def restricted(self, min_distance: float) -> "ProbeGrid":
        d = distance_to_boundary(self.points)
        keep = np.atleast_1d(d) >= min_distance
        return ProbeGrid(self.points[keep], f"{self.description}; d >= {min_distance:g}")


def default_probe_grid(l: int, levels: int = 20, interior: int = 5) -> ProbeGrid:
    """Geometric ladders ``d = 2^-j`` toward every face centre and corner plus a uniform core."""
    pts = []
    ladder = 2.0 ** -np.arange(1, levels + 1)
    anchors = []
    for axis in range(l):
        for side in (-1.0, 1.0):
            centre = np.zeros(l)
            centre[axis] = side
            normal = np.zeros(l)
            normal[axis] = -side
            anchors.append((centre, normal))
    if l > 1:
        for corner in itertools.product((-1.0, 1.0), repeat=l):
            c = np.array(corner)
            anchors.append((c, -c))
    for origin, direction in anchors:
        pts.append(origin[None, :] + ladder[:, None] * direction[None, :])
    core = (np.arange(interior) + 0.5) / interior * 2.0 - 1.0
    pts.append(np.array(list(itertools.product(core, repeat=l)), dtype=float))
    points = np.unique(np.concatenate(pts, axis=0), axis=0)
    desc = f"l={l}: ladders 2^-1..2^-{levels} from {len(anchors)} anchors + {interior}^{l} core"
    return ProbeGrid(points, desc)


def _bound(spec: FunctionClassSpec, derived: DerivedParams, order: int, d: np.ndarray):
    r, u, zeta = spec.r, spec.u, derived.zeta
    lnd = np.abs(np.log(d))
    kind = spec.kind
    if kind is ClassKind.barQ_u:
        if order <= r - 1:
            return np.ones_like(d), None
        if order == r:
            return 1.0 + lnd**u, None
        expo = order - r
        return (1.0 + lnd ** (u - 1)) / d**expo, expo
    if order <= r:
        return np.ones_like(d), None
    expo = order - r - zeta
    if kind is ClassKind.Q_u:
        return (1.0 + lnd**u) / d**expo, expo
    return d ** (-expo), expo


@dataclass(frozen=True)
class MembershipReport:
    eps: float
    per_order: dict
    flagged_orders: tuple
    grid: str
    n_points: int


def check_membership(
    f: SingularFunction, spec: FunctionClassSpec | None = None, grid: ProbeGrid | None = None
) -> MembershipReport:
    """Smallest ``eps`` with ``|D^v f| <= eps * bound_v(d(t, boundary))`` on the probe grid.

    Dividing ``f`` by ``eps`` yields a function that satisfies every derivative
    bound of the class at the probe points.
    """
    spec = f.spec if spec is None else spec
    derived = derive_params(spec)
    grid = default_probe_grid(spec.l) if grid is None else grid
    pts = np.asarray(grid.points, dtype=float).reshape(-1, spec.l)
    d = distance_to_boundary(pts)
    d = np.atleast_1d(d)
    if np.any(d <= 0.0):
        raise ValueError("probe grid touches the boundary")
    max_order = derived.s
    per_order = {}
    flagged = []
    for order in range(max_order + 1):
        bound, expo = _bound(spec, derived, order, d)
        if expo is not None and expo <= 0:
            flagged.append(order)
        worst = 0.0
        for v in multi_indices(spec.l, order, order):
            vals = np.abs(np.atleast_1d(f.derivative(pts, v)))
            worst = max(worst, float(np.max(vals / bound)))
        per_order[order] = worst
    eps = max(per_order.values())
    if not eps > 0.0 or not math.isfinite(eps):
        raise ValueError(f"membership scale is not a positive finite number: {eps}")
    return MembershipReport(eps, per_order, tuple(flagged), grid.description, len(pts))


def growth_profile(f: SingularFunction, grid: ProbeGrid | None = None) -> dict:
    """Per order in (r, s]: max of ``|D^v f| d^(|v|-r-zeta) / (1 + |ln d|^u)`` over the grid."""
    spec = f.spec
    derived = derive_params(spec)
    grid = default_probe_grid(spec.l) if grid is None else grid
    pts = np.asarray(grid.points, dtype=float).reshape(-1, spec.l)
    d = np.atleast_1d(distance_to_boundary(pts))
    out = {}
    for order in range(spec.r + 1, derived.s + 1):
        w = d ** (order - spec.r - derived.zeta) / (1.0 + np.abs(np.log(d)) ** spec.u)
        worst = 0.0
        for v in multi_indices(spec.l, order, order):
            worst = max(worst, float(np.max(np.abs(np.atleast_1d(f.derivative(pts, v))) * w)))
        out[order] = worst
    return out
