"""Command-line entry point.

Exit codes: 0 success, 2 usage error (including unsupported capability),
3 solver failure.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from ..errors import CapabilityError, SolverError, UsageError
from ..integrator import METHODS, run
from ..systems import BUILTINS, builtin
from . import output, studies

EXIT_OK, EXIT_USAGE, EXIT_SOLVER = 0, 2, 3

SUBCOMMANDS = ("integrate", "converge", "ldorder", "energy", "wp", "systems")
_FLAGS_WITH_VALUES = ("system", "method", "n", "m", "q0", "p0", "h", "h-list", "steps",
                      "t-end", "out", "tol", "component", "oracle", "mode", "baseline")
_BOOLEAN_FLAGS = ("plot",)


def expected_global_order(descriptor, n=None, m=None):
    if descriptor == "gauss2":
        return 4
    if descriptor == "midpoint":
        return 2
    return min(2 * m + 3, 2 * n) - 1


def _add_common(p):
    p.add_argument("--system", default="sho", choices=BUILTINS)
    p.add_argument("--method", default="hem", choices=METHODS)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--q0", default=None, help="comma-separated initial positions")
    p.add_argument("--p0", default=None, help="comma-separated initial momenta")
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--h-list", dest="h_list", default=None, help="comma-separated, decreasing")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--t-end", dest="t_end", type=float, default=None)
    p.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    p.add_argument("--plot", action="store_true", help="write a plot script next to the CSV")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--component", default="phase", choices=("phase", "q", "p"))
    p.add_argument("--oracle", default=None, choices=("analytic", "shooting"))
    p.add_argument("--mode", default="combined", choices=("combined", "nested"))
    p.add_argument("--baseline", default=None, choices=METHODS)
    p.add_argument("--config", default=None, help="key=value file; command-line flags win")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pcvi", description="Prolongation-collocation variational integrators")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "integrate": "run one trajectory and write t, q, p, energy and diagnostics",
        "converge": "global error at t_end against step size",
        "ldorder": "discrete Lagrangian error against the exact one",
        "energy": "energy error along a long run",
        "wp": "wall time against global error for hem and a baseline",
        "systems": "list builtin systems",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=helps[name])
        if name != "systems":
            _add_common(p)
    return parser


def read_config(path):
    """Parse key=value lines (``#`` comments) into command-line tokens."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    tokens = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key in _BOOLEAN_FLAGS:
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(f"--{key}")
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"{path}:{lineno}: {key} expects a boolean")
        elif key in _FLAGS_WITH_VALUES:
            tokens += [f"--{key}", value]
        else:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
    return tokens


def _config_path(argv):
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse_args(argv):
    parser = build_parser()
    argv = list(argv)
    path = _config_path(argv)
    if path is not None and argv and argv[0] in SUBCOMMANDS:
        # config values go first so that explicit flags override them
        argv = [argv[0]] + read_config(path) + argv[1:]
    return parser.parse_args(argv)


def _experiment(args):
    return studies.ExperimentConfig(
        system=args.system, method=args.method, n=args.n, m=args.m, q0=args.q0, p0=args.p0,
        h=args.h, h_list=args.h_list, steps=args.steps, t_end=args.t_end, out=args.out,
        plot=args.plot, tol=args.tol, component=args.component, oracle=args.oracle,
        mode=args.mode, baseline=args.baseline)


def _say(cfg, text):
    # keep stdout clean for CSV when no output file is given
    print(text, file=sys.stdout if cfg.out else sys.stderr)


def cmd_integrate(cfg):
    sysobj = cfg.system_obj()
    mcfg = cfg.method_config()
    h = 0.1 if cfg.h is None else cfg.h
    traj = run(sysobj, mcfg, cfg.initial(), h, cfg.steps_for(h, 10.0))
    d = sysobj.dim
    qn = ["q"] if d == 1 else [f"q{i + 1}" for i in range(d)]
    pn = ["p"] if d == 1 else [f"p{i + 1}" for i in range(d)]
    E = traj.energy(sysobj)
    rows = [[t, *q, *p, e, e - E[0], it, dv] for t, q, p, e, it, dv in
            zip(traj.times, traj.q, traj.p, E, traj.newton_iters, traj.v_defect)]
    output.write_csv(["t", *qn, *pn, "energy", "energy_error", "newton_iters", "v_defect"],
                     rows, cfg.out)
    if cfg.plot and cfg.out:
        output.emit_series_script(cfg.out, [qn[0], pn[0], "energy_error"])
    _say(cfg, f"{mcfg.descriptor} {cfg.system}: {traj.steps} steps, "
              f"max|dH|={np.max(np.abs(E - E[0])):.3e}")
    if traj.truncated:
        print(f"run truncated: {traj.message}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def _report(cfg, report, order):
    output.write_csv(report.header, report.rows, cfg.out)
    if cfg.plot and cfg.out:
        output.emit_loglog_script(cfg.out, "h", report.quantity, order=order,
                                  label=report.method)
    _say(cfg, report.summary())
    if report.failures:
        for f in report.failures:
            print(f"failure: {f}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_converge(cfg):
    report = studies.global_error_study(cfg)
    mcfg = cfg.method_config()
    order = expected_global_order(cfg.method, mcfg.n, mcfg.m)
    if cfg.component == "q" and cfg.method == "hem":
        order = None
    return _report(cfg, report, order)


def cmd_ldorder(cfg):
    if cfg.method != "hem":
        raise UsageError("ldorder applies to the hem method only")
    report = studies.ldorder_study(cfg)
    m = cfg.method_config().m
    return _report(cfg, report, min(2 * m + 3, 2 * cfg.n))


def cmd_energy(cfg):
    rep = studies.energy_study(cfg)
    output.write_csv(["t", "energy_error"], zip(rep.times, rep.dH), cfg.out)
    if cfg.plot and cfg.out:
        output.emit_series_script(cfg.out, ["energy_error"])
    _say(cfg, rep.summary())
    return EXIT_SOLVER if rep.truncated else EXIT_OK


def cmd_wp(cfg):
    rows = studies.work_precision(cfg)
    output.write_csv(["method", "h", "wall_time", "global_error"], rows, cfg.out)
    if cfg.plot and cfg.out:
        output.emit_loglog_script(cfg.out, "wall_time", "global_error", group="method")
    for method, h, wall, err in rows:
        _say(cfg, f"{method} h={h}: {wall:.3f}s error={err:.3e}")
    return EXIT_OK


def cmd_systems():
    for name in BUILTINS:
        s = builtin(name)
        print(f"{name}: V = {s.potential_expr}, f = {list(s.force_exprs)}")
    return EXIT_OK


_COMMANDS = {"integrate": cmd_integrate, "converge": cmd_converge, "ldorder": cmd_ldorder,
             "energy": cmd_energy, "wp": cmd_wp}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse reports its own errors with code 2
        return exc.code
    try:
        if args.command == "systems":
            return cmd_systems()
        return _COMMANDS[args.command](_experiment(args))
    except (UsageError, CapabilityError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
