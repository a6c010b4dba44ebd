"""Named verification checks, each driven by a small JSON-able parameter dict.

Every check returns a :class:`CheckResult`; ``run_check`` dispatches on the
``"check"`` key of a config so each one can live in its own config file.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bench import RunConfig, emit_report, fit_slope, run_convergence
from .cheb import interpolate, minimax_oracle
from .classes import ClassKind, FunctionClassSpec, derive_params
from .mesh1d import ScheduleWarning, build_mesh1d, closed_form_node_count
from .spline1d import node_count
from .widths import lower_bound_estimate, rho_sequence, sign_pattern_check

__all__ = [
    "CheckResult",
    "node_count_check",
    "interpolation_oracle_check",
    "minimax_check",
    "widths_check",
    "determinism_check",
    "converge_check",
    "run_check",
    "load_config",
    "CHECKS",
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details,
                "failures": self.failures}


def _result(name, details, failures) -> CheckResult:
    return CheckResult(name, not failures, details, failures)


def node_count_check(n_grid=(8, 16, 32), s_values=(2, 3, 4)) -> CheckResult:
    """Enumerated distinct nodes of the ThmA_u1 spline against the closed form."""
    rows, failures = [], []
    for s in s_values:
        spec = FunctionClassSpec(ClassKind.barQ_u, s - 1, 1.0, 1)
        for N in n_grid:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ScheduleWarning)
                mesh = build_mesh1d(spec, N, "ThmA_u1")
            got, want = node_count(mesh, s), closed_form_node_count(N, s)
            rows.append({"N": N, "s": s, "enumerated": got, "closed_form": want})
            if got != want:
                failures.append(f"N={N}, s={s}: enumerated {got} != closed form {want}")
    return _result("node_count", {"rows": rows}, failures)


def _sup_on(f, a=-1.0, b=1.0, m=20001):
    x = np.linspace(a, b, m)
    return float(np.max(np.abs(f(x))))


def interpolation_oracle_check(r_values=(2, 3, 4), n_random=100, seed=0,
                               exact_tol=1e-9, slack_tol=-1e-12) -> CheckResult:
    """Interpolation at the zeros of ``T_r`` on [-1, 1].

    ``t**r`` must show error exactly ``2**(1-r)``; random degree-``r``
    polynomials must satisfy ``err <= |f^(r)| / (r! 2**(r-1))``.
    """
    failures, details = [], {"exact": [], "min_slack": {}}
    rng = np.random.default_rng(seed)
    for r in r_values:
        f = lambda t, r=r: np.asarray(t, dtype=float) ** r
        p = interpolate(f, -1.0, 1.0, r, placement="zeros")
        err = _sup_on(lambda t: f(t) - p(t))
        details["exact"].append({"r": r, "error": err, "bound": 2.0 ** (1 - r)})
        if abs(err - 2.0 ** (1 - r)) > exact_tol:
            failures.append(f"t^{r}: error {err!r} != {2.0 ** (1 - r)!r}")
        worst = math.inf
        for _ in range(n_random):
            c = rng.uniform(-1.0, 1.0, r + 1)
            poly = np.polynomial.Polynomial(c)
            q = interpolate(poly, -1.0, 1.0, r, placement="zeros")
            e = _sup_on(lambda t: poly(t) - q(t))
            bound = abs(c[-1]) * math.factorial(r) / (math.factorial(r) * 2.0 ** (r - 1))
            worst = min(worst, bound - e)
        details["min_slack"][r] = worst
        if worst < slack_tol:
            failures.append(f"r={r}: bound violated by {-worst:.3g}")
    return _result("interpolation_oracle", details, failures)


def minimax_check(s_values=(2, 3, 4, 5), tol=1e-7) -> CheckResult:
    """Best approximation of ``t**s`` by degree ``s-1`` on [-1, 1] equals ``2**(1-s)``."""
    rows, failures = [], []
    for s in s_values:
        E = minimax_oracle(lambda t, s=s: np.asarray(t, dtype=float) ** s, -1.0, 1.0, s - 1)
        rows.append({"s": s, "E": E, "expected": 2.0 ** (1 - s)})
        if abs(E - 2.0 ** (1 - s)) > tol:
            failures.append(f"s={s}: E={E!r}")
    return _result("minimax", {"rows": rows}, failures)


def widths_check(kind="barQ_u", r=1, gamma=1.0, u=1, l=2, theorem=None,
                 n_grid=(4, 8, 16, 32), target=None, band=0.3, compliance_tol=1.000001,
                 rho_grid=tuple(range(4, 65)), rho_tol=1e-12, seed=0) -> CheckResult:
    """Bump-family premises and the scaling of the smallest bump peak with N."""
    spec = FunctionClassSpec(ClassKind(kind), r, gamma, u, l)
    d = derive_params(spec)
    target = float(d.s) if target is None else float(target)
    rows, failures = [], []
    rng = np.random.default_rng(seed)
    for N in n_grid:
        n, eps, fam = lower_bound_estimate(spec, N, theorem)
        comp = fam.compliance()
        sign = sign_pattern_check(fam, rng.choice([-1.0, 1.0], fam.n))
        rows.append({"N": N, "n": n, "eps": eps, "compliance": comp, "theorem": fam.theorem,
                     "sign_ok": sign.ok})
        if comp > compliance_tol:
            failures.append(f"N={N}: derivative bound exceeded ({comp!r}x)")
        if not sign.ok:
            failures.append(f"N={N}: sign pattern not reproduced")
    slope, _, _ = fit_slope([(row["N"], row["eps"]) for row in rows])
    if not abs(slope - target) <= band:
        failures.append(f"eps_N slope {slope:.4g} not within {band} of {target}")
    rho_rows = []
    for N in rho_grid:
        mesh = rho_sequence(N, d.s, gamma, u)
        rho_rows.append({"N": N, "m": mesh.m, "residual": mesh.max_relative_residual})
        if mesh.max_relative_residual > rho_tol:
            failures.append(f"N={N}: rho residual {mesh.max_relative_residual:.3g}")
        if not mesh.m < N:
            failures.append(f"N={N}: m={mesh.m} is not < N")
    return _result("widths", {"rows": rows, "slope": slope, "rho": rho_rows}, failures)


def converge_check(**cfg) -> CheckResult:
    rep = run_convergence(RunConfig.from_dict(cfg))
    return _result("converge", rep.to_dict(), list(rep.failures))


def determinism_check(repeats=2, **cfg) -> CheckResult:
    """Run a sweep several times; the CSV text must not change."""
    config = RunConfig.from_dict(cfg)
    texts = [emit_report(run_convergence(config), "csv") for _ in range(int(repeats))]
    failures = [] if len(set(texts)) == 1 else ["CSV output differs between runs"]
    return _result("determinism", {"repeats": repeats, "csv": texts[0]}, failures)


CHECKS = {
    "converge": converge_check,
    "node_count": node_count_check,
    "interpolation_oracle": interpolation_oracle_check,
    "minimax": minimax_check,
    "widths": widths_check,
    "determinism": determinism_check,
}


def load_config(path) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return cfg


def run_check(cfg: dict) -> CheckResult:
    cfg = dict(cfg)
    cfg.pop("description", None)
    name = cfg.pop("check", "converge")
    if name not in CHECKS:
        raise ValueError(f"unknown check {name!r}; choose from {sorted(CHECKS)}")
    for key in ("n_grid", "band", "rho_grid", "s_values", "r_values"):
        if isinstance(cfg.get(key), list):
            cfg[key] = tuple(cfg[key])
    if isinstance(cfg.get("rho_grid"), dict):
        g = cfg["rho_grid"]
        cfg["rho_grid"] = tuple(range(g["start"], g["stop"] + 1))
    return CHECKS[name](**cfg)
