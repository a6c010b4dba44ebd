"""Graded partitions of [-1, 1] with logarithmic subdivision of the layers."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._numeric import guarded_ceil, log_power
from .classes import ClassKind, DerivedParams, FunctionClassSpec, derive_params

__all__ = [
    "Variant1D",
    "ScheduleWarning",
    "graded_points",
    "subdivision_counts",
    "Mesh1D",
    "build_mesh1d",
    "closed_form_node_count",
]


class Variant1D(str, Enum):
    ThmA_u1 = "ThmA_u1"
    ThmA_u2 = "ThmA_u2"
    ThmB_Qu = "ThmB_Qu"


class ScheduleWarning(UserWarning):
    """A subdivision schedule was used outside the setting it was designed for."""


def graded_points(N: int, v: float, side: str = "left") -> np.ndarray:
    """Breakpoints ``-1 + (k/N)**v`` (left) or their mirror ``1 - (k/N)**v`` (right), k = 0..N."""
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if not v > 1:
        raise ValueError(f"grading exponent must exceed 1, got {v}")
    k = np.arange(N + 1, dtype=float)
    rho = (k / N) ** v
    rho[0], rho[-1] = 0.0, 1.0
    if side == "left":
        pts = -1.0 + rho
    elif side == "right":
        pts = 1.0 - rho
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    pts[-1] = 0.0
    return pts


def _check_variant(spec: FunctionClassSpec, variant: Variant1D):
    if variant is Variant1D.ThmB_Qu and spec.kind is not ClassKind.Q_u:
        raise ValueError(f"variant {variant.value} needs a Q_u class, got {spec.kind.value}")
    if variant is not Variant1D.ThmB_Qu and spec.kind is ClassKind.Q_u:
        raise ValueError(f"variant {variant.value} does not apply to Q_u classes")
    if variant is Variant1D.ThmA_u1 and spec.u != 1 and spec.kind is ClassKind.barQ_u:
        warnings.warn(f"ThmA_u1 schedule used with u={spec.u}", ScheduleWarning, stacklevel=3)
    if variant is Variant1D.ThmA_u2 and spec.u == 1:
        warnings.warn("ThmA_u2 schedule with u=1 reduces to M_k = 1 for k >= 1",
                      ScheduleWarning, stacklevel=3)


def subdivision_counts(
    spec: FunctionClassSpec, derived: DerivedParams | None, N: int, variant,
    local_log: bool = False,
) -> list[int]:
    """Number of equal pieces ``M_k`` for each layer interval k = 0..N-1.

    For ``ThmB_Qu`` the inner layers use ``ceil(ln(N)**(u/s))``; with
    ``local_log=True`` they use ``ceil(ln(N/k)**(u/s))`` instead, which keeps
    the interval count proportional to N.
    """
    variant = Variant1D(variant)
    if derived is None:
        derived = derive_params(spec)
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    _check_variant(spec, variant)
    r, u, s, mu = spec.r, spec.u, derived.s, derived.mu
    M = [1] * N
    if variant is Variant1D.ThmA_u1:
        M[0] = guarded_ceil(math.log(N))
    elif variant is Variant1D.ThmA_u2:
        M[0] = guarded_ceil(log_power(N, u / r))
        for k in range(1, N):
            M[k] = guarded_ceil(log_power(N / k, (u - 1) / s))
    else:
        M[0] = guarded_ceil(log_power(N, u / (r + 1 - mu)))
        for k in range(1, N):
            M[k] = guarded_ceil(log_power(N / k if local_log else N, u / s))
    return M


@dataclass(frozen=True)
class Mesh1D:
    """Tiling of [-1, 1] by closed intervals, stored as ascending breakpoints.

    ``side[i]``, ``layer[i]`` and ``sub[i]`` describe interval ``i``:
    left or right half, index k of the graded layer, and position j inside it
    (counted from the boundary).
    """

    breakpoints: np.ndarray
    side: tuple
    layer: tuple
    sub: tuple
    counts: tuple
    variant: Variant1D
    N: int
    spec: FunctionClassSpec

    @property
    def n_intervals(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def intervals(self) -> list[tuple[float, float]]:
        b = self.breakpoints
        return [(float(b[i]), float(b[i + 1])) for i in range(len(b) - 1)]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def locate(self, t) -> np.ndarray:
        """Interval index of each ``t``; breakpoints go to the interval on their left."""
        t = np.asarray(t, dtype=float)
        if np.any((t < -1.0) | (t > 1.0)) or np.any(np.isnan(t)):
            raise ValueError("points must lie in [-1, 1]")
        idx = np.searchsorted(self.breakpoints, t, side="left") - 1
        return np.clip(idx, 0, self.n_intervals - 1)


def _split(a: float, b: float, m: int) -> np.ndarray:
    j = np.arange(m + 1) / m
    pts = a * (1.0 - j) + b * j
    pts[0], pts[-1] = a, b
    return pts


def build_mesh1d(spec: FunctionClassSpec, N: int, variant, local_log: bool = False) -> Mesh1D:
    variant = Variant1D(variant)
    d = derive_params(spec)
    M = subdivision_counts(spec, d, N, variant, local_log)
    left = graded_points(N, d.v, "left")
    bps = [np.array([-1.0])]
    side, layer, sub = [], [], []
    for k in range(N):
        pieces = _split(left[k], left[k + 1], M[k])
        bps.append(pieces[1:])
        side += ["left"] * M[k]
        layer += [k] * M[k]
        sub += list(range(M[k]))
    right = graded_points(N, d.v, "right")
    for k in reversed(range(N)):
        pieces = _split(right[k + 1], right[k], M[k])
        bps.append(pieces[1:])
        side += ["right"] * M[k]
        layer += [k] * M[k]
        sub += list(reversed(range(M[k])))
    breakpoints = np.concatenate(bps)
    return Mesh1D(breakpoints, tuple(side), tuple(layer), tuple(sub), tuple(M), variant, N, spec)


def closed_form_node_count(N: int, s: int) -> int:
    """Node count ``2((ceil(ln N) - 1)(s - 1) + (N - 1)(s - 1)) + 1`` quoted for the ThmA_u1 mesh.

    The mesh built by :func:`build_mesh1d` has ``2(ceil(ln N) + N - 1)``
    intervals, so the assembled spline actually carries ``2(s - 1)`` more
    nodes than this expression; see :func:`gradedspline.spline1d.node_count`.
    """
    M = guarded_ceil(math.log(N))
    return 2 * ((M - 1) * (s - 1) + (N - 1) * (s - 1)) + 1
