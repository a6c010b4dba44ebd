"""Chebyshev-zero interpolation on an interval.

Two node placements are supported:

``"anchored"``
    the Chebyshev zeros are mapped affinely so that the outermost zeros land
    exactly on the interval endpoints.  Neighbouring intervals then share
    their endpoint nodes, which is what makes the local splines continuous.
``"zeros"``
    the plain affine image of the zeros of ``T_s`` (no node on the endpoints).

Also here: the Lebesgue constant of the anchored nodes and a discrete Remez
exchange used as a best-approximation oracle in tests.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "ExtrapolationWarning",
    "MinimaxConvergenceError",
    "chebyshev_zeros",
    "reference_nodes",
    "barycentric_weights",
    "map_nodes",
    "lagrange_basis",
    "Interpolant1D",
    "interpolate",
    "eval_interpolant",
    "lebesgue_constant",
    "minimax_oracle",
]


class ExtrapolationWarning(UserWarning):
    pass


class MinimaxConvergenceError(RuntimeError):
    def __init__(self, lower: float, upper: float, iterations: int):
        super().__init__(
            f"exchange did not converge after {iterations} iterations; "
            f"E lies in [{lower:.17g}, {upper:.17g}]"
        )
        self.bracket = (lower, upper)


def chebyshev_zeros(s: int) -> np.ndarray:
    """Zeros of ``T_s`` in ascending order."""
    if s < 1:
        raise ValueError("s must be >= 1")
    k = np.arange(1, s + 1)
    z = np.cos((2 * (s - k) + 1) * np.pi / (2 * s))
    # exact symmetry about 0
    z = 0.5 * (z - z[::-1])
    return z


@lru_cache(maxsize=None)
def _reference_nodes(s: int) -> tuple:
    z = chebyshev_zeros(s)
    if s == 1:
        return (0.5,)
    y = (z - z[0]) / (z[-1] - z[0])
    y[0], y[-1] = 0.0, 1.0
    y = 0.5 * (y + (1.0 - y[::-1]))
    return tuple(y)


def reference_nodes(s: int) -> np.ndarray:
    """Anchored nodes on [0, 1]: first node 0, last node 1 (midpoint when s == 1)."""
    return np.array(_reference_nodes(s))


def barycentric_weights(nodes) -> np.ndarray:
    x = np.asarray(nodes, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    w = 1.0 / np.prod(diff, axis=1)
    return w / np.max(np.abs(w))


def _affine(y: np.ndarray, a: float, b: float) -> np.ndarray:
    # a*(1-y) + b*y hits a and b exactly for y = 0 and y = 1
    return a * (1.0 - y) + b * y


def map_nodes(s: int, a: float, b: float, placement: str = "anchored") -> np.ndarray:
    if not a < b:
        raise ValueError(f"empty interval [{a}, {b}]")
    if placement == "anchored":
        return _affine(reference_nodes(s), a, b)
    if placement == "zeros":
        return _affine((chebyshev_zeros(s) + 1.0) / 2.0, a, b)
    raise ValueError(f"unknown node placement {placement!r}")


def lagrange_basis(x, nodes, weights) -> np.ndarray:
    """Values of all Lagrange basis polynomials at ``x``; shape ``x.shape + (s,)``."""
    x = np.asarray(x, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    diff = x[..., None] - nodes
    exact = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = weights / diff
        basis = terms / terms.sum(axis=-1, keepdims=True)
    hit = exact.any(axis=-1)
    if np.any(hit):
        basis = np.where(hit[..., None], exact.astype(float), basis)
    return basis


@dataclass(frozen=True)
class Interpolant1D:
    a: float
    b: float
    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.nodes) - 1

    def __call__(self, t):
        return eval_interpolant(self, t)


def interpolate(
    f: Callable, a: float, b: float, s: int, placement: str = "anchored"
) -> Interpolant1D:
    """Degree ``s - 1`` interpolant of ``f`` at ``s`` Chebyshev nodes on ``[a, b]``."""
    nodes = map_nodes(s, a, b, placement)
    values = np.asarray(f(nodes), dtype=float).reshape(s)
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(f"non-finite function value at node {i} (t = {nodes[i]!r})")
    return Interpolant1D(a, b, nodes, values, barycentric_weights(nodes))


def eval_interpolant(p: Interpolant1D, t):
    t = np.asarray(t, dtype=float)
    if np.any((t < p.a) | (t > p.b)):
        warnings.warn("evaluating interpolant outside its interval", ExtrapolationWarning, stacklevel=2)
    out = lagrange_basis(t, p.nodes, p.weights) @ p.values
    return float(out) if out.ndim == 0 else out


def lebesgue_constant(s: int, samples: int | None = None, a: float = -1.0, b: float = 1.0) -> float:
    """Max of the Lebesgue function of the anchored nodes on ``[a, b]``.

    The dense-grid maximum is polished with a bounded scalar search around the
    best grid point.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if s == 1:
        return 1.0
    nodes = map_nodes(s, a, b)
    w = barycentric_weights(nodes)
    if samples is None:
        samples = 10 * s * s + 1

    def leb(x):
        return np.abs(lagrange_basis(x, nodes, w)).sum(axis=-1)

    x = np.linspace(a, b, samples)
    vals = leb(x)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, samples - 1)]
    res = minimize_scalar(lambda z: -float(leb(z)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14 * (b - a)})
    return max(best, -float(res.fun))


def _exchange(err: np.ndarray, ref: np.ndarray, n: int) -> np.ndarray:
    """Multiple-exchange step on a discrete grid; returns ``n`` alternating indices."""
    m = len(err)
    # local extrema of |err| with sign, endpoints included
    cand = []
    for i in range(m):
        left = err[i - 1] if i > 0 else None
        right = err[i + 1] if i < m - 1 else None
        e = err[i]
        if e == 0.0:
            continue
        if (left is None or abs(e) >= abs(left) or np.sign(left) != np.sign(e)) and (
            right is None or abs(e) >= abs(right) or np.sign(right) != np.sign(e)
        ):
            cand.append(i)
    # collapse runs of equal sign to their largest member
    alt: list = []
    for i in cand:
        if alt and np.sign(err[alt[-1]]) == np.sign(err[i]):
            if abs(err[i]) > abs(err[alt[-1]]):
                alt[-1] = i
        else:
            alt.append(i)
    while len(alt) > n:
        if len(alt) == n + 1:
            alt.pop(0 if abs(err[alt[0]]) < abs(err[alt[-1]]) else -1)
            continue
        j = min(range(len(alt)), key=lambda q: abs(err[alt[q]]))
        if j == 0 or j == len(alt) - 1:
            alt.pop(j)
        else:
            keep = alt[j - 1] if abs(err[alt[j - 1]]) >= abs(err[alt[j + 1]]) else alt[j + 1]
            alt[j - 1 : j + 2] = [keep]
    if len(alt) == n:
        return np.array(alt)
    # too little alternation: swap the global extremum into the old reference
    g = int(np.argmax(np.abs(err)))
    ref = list(ref)
    if g in ref:
        return np.array(ref)
    pos = int(np.searchsorted(ref, g))
    if pos == 0:
        if np.sign(err[g]) == np.sign(err[ref[0]]):
            ref[0] = g
        else:
            ref = [g] + ref[:-1]
    elif pos == len(ref):
        if np.sign(err[g]) == np.sign(err[ref[-1]]):
            ref[-1] = g
        else:
            ref = ref[1:] + [g]
    else:
        if np.sign(err[g]) == np.sign(err[ref[pos - 1]]):
            ref[pos - 1] = g
        else:
            ref[pos] = g
    return np.array(sorted(ref))


def minimax_oracle(
    f: Callable,
    a: float,
    b: float,
    degree: int,
    tol: float = 1e-9,
    grid_size: int = 2049,
    max_iter: int = 60,
) -> float:
    """Best uniform approximation error ``E_d(f, [a, b])`` by polynomials of degree ``d``.

    Remez exchange on a Chebyshev-distributed grid, followed by local
    maximisation of the error around the reference points.  The returned value
    is the sup-norm error of the final polynomial (an upper bound for ``E_d``)
    and agrees with the levelled error (a lower bound) to relative ``tol``.
    """
    if not a < b:
        raise ValueError("empty interval")
    n = degree + 2
    theta = np.linspace(np.pi, 0.0, grid_size)
    y = np.cos(theta)
    y[0], y[-1] = -1.0, 1.0

    def to_x(yy):
        return a + (b - a) * (yy + 1.0) / 2.0

    def evalf(yy):
        return np.asarray(f(to_x(yy)), dtype=float) * np.ones_like(yy)

    F = evalf(y)
    if np.ptp(F) == 0.0:
        return 0.0
    V = lambda yy: np.polynomial.chebyshev.chebvander(yy, degree)
    ref_y = np.cos(np.pi * (1.0 - np.arange(n) / (n - 1)))
    ref = np.array([int(np.argmin(np.abs(y - t))) for t in ref_y])
    level = 0.0
    upper = np.inf
    it = 0
    refinements = 0
    while True:
        it += 1
        if it > max_iter:
            raise MinimaxConvergenceError(abs(level), upper, it - 1)
        A = np.hstack([V(y[ref]), ((-1.0) ** np.arange(n))[:, None]])
        sol = np.linalg.solve(A, F[ref])
        coef, level = sol[:-1], sol[-1]
        err = F - V(y) @ coef
        emax = float(np.max(np.abs(err)))
        if emax - abs(level) <= tol * emax:
            # polish: locate the continuous maxima near the reference
            extra = []
            upper = emax
            for i in ref:
                lo, hi = y[max(i - 1, 0)], y[min(i + 1, len(y) - 1)]
                g = lambda z: -abs(float(evalf(np.array([z]))[0] - V(np.array([z]))[0] @ coef))
                res = minimize_scalar(g, bounds=(lo, hi), method="bounded",
                                      options={"xatol": 1e-15})
                extra.append(res.x)
                upper = max(upper, -res.fun)
            if upper - abs(level) <= tol * upper or refinements >= 4:
                if upper - abs(level) > tol * upper:
                    raise MinimaxConvergenceError(abs(level), upper, it)
                return float(upper)
            refinements += 1
            keep_vals = y[ref]
            y = np.unique(np.concatenate([y, extra]))
            F = evalf(y)
            ref = np.array([int(np.argmin(np.abs(y - t))) for t in keep_vals])
            continue
        ref = _exchange(err, ref, n)
