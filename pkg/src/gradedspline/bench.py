"""Convergence sweeps, slope fitting and report output."""

from __future__ import annotations

import dataclasses
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classes import ClassKind, FunctionClassSpec, derive_params, test_function
from .mesh1d import Variant1D, build_mesh1d
from .mesh_ld import (
    SCHEDULES,
    check_disjoint,
    check_edge_window,
    check_vertex_nesting,
    check_volume,
    decompose_domain,
    decompose_domain_aligned,
    regime,
    schedule_ld,
)
from .spline1d import build_spline1d, sup_error
from .spline_ld import build_spline_ld, max_interface_jump, nodes_per_dim, sup_error_ld

__all__ = [
    "RunConfig",
    "RunError",
    "ConvergenceReport",
    "fit_slope",
    "predicted_exponent",
    "run_entry",
    "run_convergence",
    "emit_report",
    "CSV_HEADER",
]

CSV_HEADER = "N,n_nodes,sup_error,runtime_ms"


@dataclass
class RunConfig:
    kind: str = "barQ_u"
    r: int = 2
    gamma: float = 1.0
    u: int = 1
    l: int = 1
    variant: str = "ThmA_u1"
    n_grid: tuple = (8, 16, 32, 64, 128)
    samples: int | None = None
    family: str | None = None
    continuous: bool = True
    aligned: bool = True
    local_log: bool = False
    metric: str = "slope"  # or "log_ratio": max/min of err * n / ln n
    band: tuple = (2.7, 3.5)
    ratio_max: float = 3.0
    count_ratio_max: float | None = None  # bound on max/min of sum(M_k)/N
    check_continuity: bool = False
    check_partition: bool = False
    timing: bool = False
    out: str | None = None
    format: str = "csv"
    jobs: int = 1

    def __post_init__(self):
        self.n_grid = tuple(int(n) for n in self.n_grid)
        self.band = tuple(float(b) for b in self.band)
        if len(self.n_grid) < 2:
            raise ValueError("N grid needs at least 2 entries")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("N grid must be strictly increasing")
        if self.metric not in ("slope", "log_ratio"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.l == 1:
            Variant1D(self.variant)
        elif self.variant not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.variant!r}; choose from {SCHEDULES}")

    @property
    def spec(self) -> FunctionClassSpec:
        return FunctionClassSpec(ClassKind(self.kind), self.r, self.gamma, self.u, self.l)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["n_grid"] = list(self.n_grid)
        d["band"] = list(self.band)
        return d


class RunError(RuntimeError):
    def __init__(self, N: int, stage: str, cause: Exception):
        super().__init__(f"N={N}, stage {stage}: {cause}")
        self.N, self.stage, self.cause = N, stage, cause


@dataclass
class ConvergenceReport:
    config: RunConfig
    rows: list  # (N, n_nodes, sup_error, runtime_ms)
    extras: list = field(default_factory=list)
    slope: float = math.nan
    intercept: float = math.nan
    residual: float = math.nan
    predicted: float = math.nan
    ratio: float = math.nan
    count_ratio: float = math.nan
    passed: bool = False
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "rows": [list(r) for r in self.rows],
            "extras": self.extras,
            "slope": _num(self.slope),
            "intercept": _num(self.intercept),
            "residual": _num(self.residual),
            "predicted": _num(self.predicted),
            "ratio": _num(self.ratio),
            "count_ratio": _num(self.count_ratio),
            "passed": self.passed,
            "failures": self.failures,
        }


def _num(x):
    # JSON has no NaN
    return None if isinstance(x, float) and math.isnan(x) else x


def fit_slope(points) -> tuple[float, float, float]:
    """Least-squares fit of ``-ln(err) = slope * ln(n) + intercept``.

    With three or more points the one with the smallest ``n`` is dropped
    (pre-asymptotic).  Returns ``(slope, intercept, rms residual)``.
    """
    pts = sorted((float(n), float(e)) for n, e in points)
    if len(pts) < 2:
        raise ValueError("need at least 2 points")
    if any(e <= 0 or not math.isfinite(e) for _, e in pts):
        raise ValueError("rate unmeasurable: non-positive error (exact reproduction?)")
    if any(n <= 0 for n, _ in pts):
        raise ValueError("n must be positive")
    if len(pts) >= 3:
        pts = pts[1:]
    x = np.log([n for n, _ in pts])
    y = -np.log([e for _, e in pts])
    if np.ptp(x) == 0:
        raise ValueError("all n are equal")
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(res**2)))


def predicted_exponent(spec: FunctionClassSpec) -> float:
    """Rate of the error in terms of the node count: ``s`` in 1D, ``s/l`` up to
    the critical grading, ``(s - gamma)/(l - 1)`` above it (log factors ignored)."""
    d = derive_params(spec)
    if spec.l == 1:
        return float(d.s)
    if regime(d.v, spec.l) == "above":
        return (d.s - spec.gamma) / (spec.l - 1)
    return d.s / spec.l


def _target(cfg: RunConfig):
    return test_function(cfg.spec, cfg.family).normalized()


def run_entry(cfg: RunConfig, N: int) -> tuple[tuple, dict]:
    """One sweep entry: build, interpolate, measure.  Returns ``(row, extras)``."""
    stage = "setup"
    try:
        spec = cfg.spec
        d = derive_params(spec)
        f = _target(cfg)
        t0 = time.perf_counter()
        extras: dict = {"N": N}
        if cfg.l == 1:
            stage = "mesh"
            mesh = build_mesh1d(spec, N, cfg.variant, local_log=cfg.local_log)
            stage = "spline"
            sp = build_spline1d(f, mesh, d.s)
            stage = "error"
            err = sup_error(sp, f) if cfg.samples is None else sup_error(sp, f, q=cfg.samples)
            n = sp.n_nodes
            extras["intervals"] = mesh.n_intervals
            extras["count_ratio"] = sum(mesh.counts) / N
        else:
            stage = "schedule"
            M = schedule_ld(spec, d, N, cfg.variant)
            stage = "partition"
            build = decompose_domain_aligned if cfg.aligned else decompose_domain
            part = build(N, d.v, cfg.l, M, schedule_id=cfg.variant)
            stage = "spline"
            sp = build_spline_ld(f, part, nodes_per_dim(spec, d), continuous=cfg.continuous)
            stage = "error"
            err = sup_error_ld(sp, f) if cfg.samples is None else sup_error_ld(sp, f, q=cfg.samples)
            n = sp.n_nodes
            extras["cells"] = part.n_cells
            extras["count_ratio"] = sum(M) / N
            if cfg.check_continuity:
                stage = "continuity"
                extras["max_jump"] = max_interface_jump(sp)
                extras["max_abs_f"] = float(np.max(np.abs(sp.values)))
            if cfg.check_partition:
                stage = "partition-checks"
                extras["volume_error"] = check_volume(part)
                extras["window_violations"] = len(check_edge_window(part))
                extras["nesting_violations"] = (
                    len(check_vertex_nesting(part)) if part.variant == "aligned" else 0
                )
                extras["overlaps"] = check_disjoint(part)
        ms = (time.perf_counter() - t0) * 1000.0 if cfg.timing else 0.0
        return (N, int(n), float(err), float(ms)), extras
    except Exception as exc:
        raise RunError(N, stage, exc) from exc


def _entry(args):
    cfg, N = args
    return run_entry(cfg, N)


def run_convergence(cfg: RunConfig) -> ConvergenceReport:
    jobs = max(1, int(cfg.jobs))
    if jobs > 1 and len(cfg.n_grid) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cfg.n_grid))) as ex:
            results = list(ex.map(_entry, [(cfg, N) for N in cfg.n_grid]))
    else:
        results = [run_entry(cfg, N) for N in cfg.n_grid]
    results.sort(key=lambda t: t[0][0])
    rows = [r for r, _ in results]
    extras = [e for _, e in results]
    rep = ConvergenceReport(cfg, rows, extras, predicted=predicted_exponent(cfg.spec))
    failures = []
    try:
        rep.slope, rep.intercept, rep.residual = fit_slope([(n, e) for _, n, e, _ in rows])
    except ValueError as exc:
        failures.append(str(exc))
    if cfg.metric == "slope":
        lo, hi = cfg.band
        if not lo <= rep.slope <= hi:
            failures.append(f"slope {rep.slope:.4g} outside [{lo}, {hi}]")
    else:
        q = [e * n / math.log(n) for _, n, e, _ in rows]
        rep.ratio = max(q) / min(q)
        if not rep.ratio <= cfg.ratio_max:
            failures.append(f"err*n/ln(n) ratio {rep.ratio:.4g} exceeds {cfg.ratio_max}")
    cr = [e["count_ratio"] for e in extras]
    rep.count_ratio = max(cr) / min(cr)
    if cfg.count_ratio_max is not None and not rep.count_ratio <= cfg.count_ratio_max:
        failures.append(f"sum(M_k)/N ratio {rep.count_ratio:.4g} exceeds {cfg.count_ratio_max}")
    for e in extras:
        if "max_jump" in e and e["max_jump"] > 1e-9 * (1.0 + e["max_abs_f"]):
            failures.append(f"N={e['N']}: interface jump {e['max_jump']:.3g}")
        if "volume_error" in e:
            bad = [k for k in ("window_violations", "nesting_violations", "overlaps") if e[k]]
            if e["volume_error"] > 1e-9 or bad:
                failures.append(f"N={e['N']}: partition checks failed ({', '.join(bad) or 'volume'})")
    rep.failures = failures
    rep.passed = not failures
    return rep


def _csv_text(report: ConvergenceReport) -> str:
    lines = [CSV_HEADER]
    for N, n, err, ms in report.rows:
        lines.append(f"{N},{n},{err:.17g},{ms:.17g}")
    return "\n".join(lines) + "\n"


def emit_report(report: ConvergenceReport, fmt: str = "csv", path=None) -> str:
    """Write the report as CSV (rows only) or JSON (everything); ``path`` may be
    a filename, a file object, ``"-"`` for stdout, or ``None`` to just return the text."""
    if fmt == "csv":
        text = _csv_text(report)
    elif fmt == "json":
        text = json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path == "-":
        sys.stdout.write(text)
    elif isinstance(path, io.IOBase) or hasattr(path, "write"):
        path.write(text)
    elif path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
