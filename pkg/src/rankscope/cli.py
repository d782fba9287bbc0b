"""Command-line interface.

::

    rankscope cond approx --input A.csv --rank 2 [--json]
    rankscope cond recovery --instance inst.json [--sensing khatri-rao] [--json]
    rankscope verify approx --m 8 --n 6 --r 2 --seed 0 --h 1e-5
    rankscope verify recovery --instance inst.json --h 1e-4
    rankscope gen-instance --m 10 --n 8 --r 2 --phi 2 --t 0.2 --seed 0 --out inst.json
    rankscope sweep --m 20 --n 16 --r 4 --t-steps 25 --phi-steps 10 --seed 0 --out grid.csv
    rankscope plot --in grid.csv --out grid.svg
"""
import argparse
import json
import logging
import math
import sys

from . import io
from .conditioning import condition_approximation, kappa_recovery
from .exceptions import RankscopeError
from .experiment import SweepConfig, make_instance, read_grid_csv, sweep, write_grid_csv
from .oracle import SolverSettings, fd_kappa_approximation, fd_kappa_recovery
from .plot import write_svg
from .rng import GaussianStream

STREAM_VERIFY = 4


def _print_report(report, as_json, **extra):
    if as_json:
        print(io.dump_report(report, **extra))
        return
    for key, value in extra.items():
        print(f"{key}: {value}")
    d = report.to_dict()
    for key in ("kappa", "sigma_min_TNR", "local_min", "illposed", "residual_norm", "gap", "min_hessian_eigenvalue"):
        if d.get(key) is not None:
            print(f"{key}: {d[key]}")
    for w in d["warnings"]:
        print(f"warning: {w}")


def cmd_cond_approx(args):
    A = io.read_matrix(args.input)
    _print_report(condition_approximation(A, args.rank), args.json)
    return 0


def cmd_cond_recovery(args):
    A, Y, L = io.load_instance(args.instance, sensing=args.sensing)
    _print_report(kappa_recovery(A, Y, L), args.json, sensing=L.kind, ell=L.ell)
    return 0


def _compare(label_a, a, label_b, b, tol, as_json):
    dev = abs(a - b) / abs(b) if b else math.inf
    ok = dev <= tol
    if as_json:
        print(json.dumps({label_a: a, label_b: b, "relative_deviation": dev, "tolerance": tol, "ok": ok}, indent=2))
    else:
        print(f"{label_a}: {a:.12g}")
        print(f"{label_b}: {b:.12g}")
        print(f"relative deviation: {dev:.3e} (tolerance {tol:g}) {'OK' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_verify_approx(args):
    if args.input:
        A = io.read_matrix(args.input)
    else:
        A = GaussianStream(args.seed, STREAM_VERIFY).standard_normal((args.m, args.n))
    closed = condition_approximation(A, args.r).kappa
    fd = fd_kappa_approximation(A, args.r, h=args.h)
    return _compare("kappa_closed_form", closed, "kappa_finite_difference", fd, args.tol, args.json)


def cmd_verify_recovery(args):
    A, Y, L = io.load_instance(args.instance, sensing=args.sensing)
    kappa = kappa_recovery(A, Y, L).kappa
    fd = fd_kappa_recovery(A, L, Y, h=args.h, settings=SolverSettings(method=args.solver))
    return _compare("kappa_algorithm", kappa, "kappa_finite_difference", fd, args.tol, args.json)


def cmd_gen_instance(args):
    A, Y, L = make_instance(args.m, args.n, args.r, args.phi, args.t, args.seed, args.sensing)
    io.save_instance(args.out, A, Y, L)
    print(args.out)
    return 0


def cmd_sweep(args):
    cfg = SweepConfig(
        m=args.m,
        n=args.n,
        r=args.r,
        t_min=args.t_min,
        t_max=args.t_max,
        t_steps=args.t_steps,
        phi_min=args.phi_min,
        phi_max=args.phi_max,
        phi_steps=args.phi_steps,
        seed=args.seed,
        out=args.out,
        normal=args.normal,
        threads=args.threads,
    )
    cells = sweep(cfg)
    if not args.out:
        write_grid_csv(cells, sys.stdout)
    return 0


def cmd_plot(args):
    write_svg(read_grid_csv(args.input), args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="rankscope", description="Condition numbers of low-rank approximation and recovery.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    sensing_choices = list(io.SENSING_TYPES)

    cond = sub.add_parser("cond", help="compute a condition number").add_subparsers(dest="what", required=True)
    a = cond.add_parser("approx", help="best rank-r approximation of a CSV matrix")
    a.add_argument("--input", required=True)
    a.add_argument("--rank", type=int, required=True)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_cond_approx)
    rc = cond.add_parser("recovery", help="recovery instance from a JSON file")
    rc.add_argument("--instance", required=True)
    rc.add_argument("--sensing", choices=sensing_choices)
    rc.add_argument("--json", action="store_true")
    rc.set_defaults(func=cmd_cond_recovery)

    verify = sub.add_parser("verify", help="compare against finite differences").add_subparsers(dest="what", required=True)
    va = verify.add_parser("approx")
    va.add_argument("--m", type=int, default=8)
    va.add_argument("--n", type=int, default=6)
    va.add_argument("--r", type=int, default=2)
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--input", help="CSV matrix instead of a random one")
    va.add_argument("--h", type=float, default=1e-5)
    va.add_argument("--tol", type=float, default=1e-4)
    va.add_argument("--json", action="store_true")
    va.set_defaults(func=cmd_verify_approx)
    vr = verify.add_parser("recovery")
    vr.add_argument("--instance", required=True)
    vr.add_argument("--sensing", choices=sensing_choices)
    vr.add_argument("--h", type=float, default=1e-4)
    vr.add_argument("--tol", type=float, default=1e-3)
    vr.add_argument("--solver", choices=["newton", "gauss-newton"], default="newton")
    vr.add_argument("--json", action="store_true")
    vr.set_defaults(func=cmd_verify_recovery)

    g = sub.add_parser("gen-instance", help="write a random recovery instance")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--phi", type=float, default=2.0)
    g.add_argument("--t", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--sensing", choices=sensing_choices, default="khatri-rao")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_instance)

    s = sub.add_parser("sweep", help="condition number over the (t, phi) grid, as CSV")
    s.add_argument("--m", type=int, default=50)
    s.add_argument("--n", type=int, default=40)
    s.add_argument("--r", type=int, default=10)
    s.add_argument("--t-min", type=float, default=-1.0)
    s.add_argument("--t-max", type=float, default=1.0)
    s.add_argument("--t-steps", type=int, default=299)
    s.add_argument("--phi-min", type=float, default=1.0)
    s.add_argument("--phi-max", type=float, default=10.0)
    s.add_argument("--phi-steps", type=int, default=150)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--threads", type=int)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--normal-per-phi", dest="normal", action="store_const", const="per-phi")
    mode.add_argument("--normal-fixed", dest="normal", action="store_const", const="fixed")
    s.set_defaults(func=cmd_sweep, normal="per-phi")

    pl = sub.add_parser("plot", help="render a sweep CSV as an SVG heatmap")
    pl.add_argument("--in", dest="input", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (RankscopeError, OSError) as exc:
        print(f"rankscope: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
