"""Command-line entry point: ``gradedspline <command> ...``.

Exit status is 0 only when every check in the run passed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import RunConfig, RunError, emit_report, run_convergence
from .checks import load_config, run_check, widths_check
from .classes import ClassKind, FunctionClassSpec, check_membership, derive_params, test_function
from .mesh_ld import decompose_domain, decompose_domain_aligned, dump_partition, schedule_ld


def _grid(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N grid {text!r}; expected e.g. 8,16,32")


def _band(text: str) -> tuple:
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad band {text!r}; expected LO,HI")
    return lo, hi


def _add_class_flags(p: argparse.ArgumentParser):
    p.add_argument("--class", dest="kind", choices=[k.value for k in ClassKind])
    p.add_argument("--r", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--u", type=int)
    p.add_argument("--l", type=int)


def _overrides(args, names) -> dict:
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


def _spec(args, defaults=None) -> FunctionClassSpec:
    d = dict(kind="barQ_u", r=1, gamma=1.0, u=1, l=1)
    d.update(defaults or {})
    d.update(_overrides(args, ("kind", "r", "gamma", "u", "l")))
    return FunctionClassSpec(ClassKind(d["kind"]), d["r"], d["gamma"], d["u"], d["l"])


def _write(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_converge(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    cfg.pop("description", None)
    if cfg.pop("check", "converge") != "converge":
        print("config is not a convergence sweep; use `verify`", file=sys.stderr)
        return 2
    cfg.update(_overrides(args, ("kind", "r", "gamma", "u", "l", "variant", "n_grid",
                                 "samples", "format", "out", "jobs", "band")))
    if args.continuous is not None:
        cfg["continuous"] = args.continuous
    if args.timing:
        cfg["timing"] = True
    if args.local_log:
        cfg["local_log"] = True
    config = RunConfig.from_dict(cfg)
    try:
        rep = run_convergence(config)
    except RunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit_report(rep, config.format, config.out or "-")
    status = "PASS" if rep.passed else "FAIL"
    msg = f"{status} slope={rep.slope:.4f} predicted={rep.predicted:.4g}"
    if rep.failures:
        msg += " (" + "; ".join(rep.failures) + ")"
    print(msg, file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_widths(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    cfg.pop("description", None)
    cfg.pop("check", None)
    cfg.update(_overrides(args, ("kind", "r", "gamma", "u", "l", "n_grid")))
    if args.variant:
        cfg["theorem"] = args.variant
    for key in ("n_grid", "rho_grid"):
        if isinstance(cfg.get(key), list):
            cfg[key] = tuple(cfg[key])
    if isinstance(cfg.get("rho_grid"), dict):
        g = cfg["rho_grid"]
        cfg["rho_grid"] = tuple(range(g["start"], g["stop"] + 1))
    res = widths_check(**cfg)
    if args.format == "json":
        _write(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
    else:
        lines = ["N,n_bumps,eps,compliance,theorem"]
        for row in res.details["rows"]:
            lines.append(f"{row['N']},{row['n']},{row['eps']:.17g},{row['compliance']:.17g},{row['theorem']}")
        _write("\n".join(lines) + "\n", args.out)
    print(("PASS" if res.passed else "FAIL") + f" eps slope={res.details['slope']:.4f}", file=sys.stderr)
    for f in res.failures[:10]:
        print("  " + f, file=sys.stderr)
    if len(res.failures) > 10:
        print(f"  ... {len(res.failures) - 10} more", file=sys.stderr)
    return 0 if res.passed else 1


def cmd_check_membership(args) -> int:
    spec = _spec(args)
    f = test_function(spec, args.family)
    rep = check_membership(f)
    out = {
        "class": spec.kind.value, "r": spec.r, "gamma": spec.gamma, "u": spec.u, "l": spec.l,
        "family": f.family, "eps": rep.eps,
        "per_order": {str(k): v for k, v in rep.per_order.items()},
        "flagged_orders": list(rep.flagged_orders), "grid": rep.grid, "points": rep.n_points,
    }
    _write(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def cmd_dump_partition(args) -> int:
    spec = _spec(args, {"l": 2})
    d = derive_params(spec)
    M = schedule_ld(spec, d, args.N, args.variant or "uniform")
    if args.aligned:
        part = decompose_domain_aligned(args.N, d.v, spec.l, M, schedule_id=args.variant or "uniform")
    else:
        part = decompose_domain(args.N, d.v, spec.l, M, schedule_id=args.variant or "uniform")
    if args.out in (None, "-"):
        dump_partition(part, sys.stdout)
    else:
        dump_partition(part, args.out)
    print(f"{part.n_cells} cells", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    ok = True
    results = []
    for path in args.configs:
        res = run_check(load_config(path))
        ok &= res.passed
        results.append({"config": path, **res.to_dict()})
        print(f"{'PASS' if res.passed else 'FAIL'} {path}", file=sys.stderr)
        for f in res.failures[:5]:
            print("  " + f, file=sys.stderr)
    if args.out:
        _write(json.dumps(results, indent=2, sort_keys=True, default=str) + "\n", args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gradedspline", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("converge", help="convergence sweep over an N grid")
    _add_class_flags(c)
    c.add_argument("--variant", help="1D variant (ThmA_u1, ThmA_u2, ThmB_Qu) or multivariate schedule")
    c.add_argument("--n-grid", dest="n_grid", type=_grid)
    c.add_argument("--samples", type=int, help="samples per interval (1D) or per axis (l >= 2)")
    c.add_argument("--continuous", action=argparse.BooleanOptionalAction, default=None)
    c.add_argument("--band", type=_band, help="accepted slope range LO,HI")
    c.add_argument("--local-log", dest="local_log", action="store_true")
    c.add_argument("--timing", action="store_true", help="record wall time (output no longer byte-stable)")
    c.add_argument("--format", choices=["csv", "json"])
    c.add_argument("--out")
    c.add_argument("--jobs", type=int)
    c.add_argument("--config")
    c.set_defaults(func=cmd_converge)

    w = sub.add_parser("widths", help="lower-bound bump families")
    _add_class_flags(w)
    w.add_argument("--variant", help="thm31, thm32, thm36 or thm38 (default: by regime)")
    w.add_argument("--n-grid", dest="n_grid", type=_grid)
    w.add_argument("--format", choices=["csv", "json"], default="csv")
    w.add_argument("--out")
    w.add_argument("--config")
    w.set_defaults(func=cmd_widths)

    m = sub.add_parser("check-membership", help="scale of the built-in family function")
    _add_class_flags(m)
    m.add_argument("--family")
    m.add_argument("--out")
    m.set_defaults(func=cmd_check_membership)

    d = sub.add_parser("dump-partition", help="write a multivariate partition as text")
    _add_class_flags(d)
    d.add_argument("--N", type=int, required=True)
    d.add_argument("--variant", help="subdivision schedule (default uniform)")
    d.add_argument("--aligned", action="store_true")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dump_partition)

    v = sub.add_parser("verify", help="run one or more check config files")
    v.add_argument("configs", nargs="+")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
