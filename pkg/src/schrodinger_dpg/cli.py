"""Command-line driver: solve, convergence, interp and oracle subcommands.

Flags mirror the config-file keys; every subcommand writes CSV to the
path given by --out (standard output when omitted) and exits nonzero
with a diagnostic on any failure.
"""

from __future__ import annotations

import argparse
import sys

from . import dpg_core, harness


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--case", choices=("gaussian", "wavepacket"))
    sub.add_argument("--M", type=float, help="Gaussian amplitude")
    sub.add_argument("--T0", type=float, help="Gaussian pulse width")
    sub.add_argument("--beta", type=float, help="dispersion coefficient")
    sub.add_argument("--omega", type=float, help="wavepacket width parameter")
    sub.add_argument("--p", type=int, help="trial order (>= 3)")
    sub.add_argument("--dp", type=int, help="test-space enrichment")
    sub.add_argument("--variant", choices=("practical", "ideal"))
    sub.add_argument("--solver", choices=("auto", "direct", "cg"))
    sub.add_argument("--tol", type=float, help="algebraic solve tolerance")
    sub.add_argument("--cond", action="store_const", const=True, default=None,
                     help="also estimate the system condition number")
    sub.add_argument("--out", help="output CSV path (default: stdout)")


def _config_from_args(args) -> harness.StudyConfig:
    text = ""
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    overrides = {k: getattr(args, k, None) for k in
                 ("case", "M", "T0", "beta", "omega", "p", "dp", "variant",
                  "solver", "tol", "out", "cond")}
    if getattr(args, "levels", None):
        overrides["levels"] = tuple(int(v) for v in args.levels.split(","))
    return harness.parse_config(text, **overrides)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    cfg = _config_from_args(args)
    row, report = harness.run_level(cfg, args.n)
    header = "level,h,n_dofs,l2_error,eta,cond,residual_rel,wall_time"
    line = ",".join([str(row.level), repr(row.h), str(row.n_dofs),
                     repr(row.l2_error), repr(row.eta),
                     "" if row.cond is None else repr(row.cond),
                     repr(report.residual_rel), repr(row.wall_time)])
    _emit(header + "\n" + line + "\n", cfg.out)
    return 0


def cmd_convergence(args) -> int:
    cfg = _config_from_args(args)
    table = harness.run_convergence(cfg)
    if not cfg.out:
        _emit(table.to_csv(), None)
    try:
        rate_n = table.rate_n()
        rate_h = table.rate_h()
        print(f"# fitted rates: h-rate={rate_h:.3f} n-rate={rate_n:.3f}",
              file=sys.stderr)
    except harness.FitError as exc:
        print(f"# rate fit unavailable: {exc}", file=sys.stderr)
    return 0


def cmd_interp(args) -> int:
    levels = tuple(int(v) for v in args.levels.split(","))
    table = harness.run_interp_study(args.p, levels, out=args.out)
    if not args.out:
        _emit(table.to_csv(), None)
    s = table.slopes()
    print(f"# fitted slopes: l2={s[0]:.3f} dt={s[1]:.3f} dxx={s[2]:.3f}",
          file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    modes = tuple(int(v) for v in args.modes.split(","))
    table = harness.run_oracle(modes, T=args.T, out=args.out)
    if not args.out:
        _emit(table.to_csv(), None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schrodinger-dpg",
        description="Spacetime DPG solver and study harness for the 1D "
                    "Schrodinger equation")
    subs = parser.add_subparsers(dest="command", required=True)

    solve = subs.add_parser("solve", help="solve one mesh level")
    _add_common(solve)
    solve.add_argument("--n", type=int, required=True,
                       help="elements per direction")
    solve.set_defaults(func=cmd_solve)

    conv = subs.add_parser("convergence", help="uniform-refinement study")
    _add_common(conv)
    conv.add_argument("--levels", help="comma-separated level list")
    conv.set_defaults(func=cmd_convergence)

    interp = subs.add_parser("interp", help="interpolation-rate study")
    interp.add_argument("--p", type=int, default=3)
    interp.add_argument("--levels", default="2,4,8,16")
    interp.add_argument("--out")
    interp.set_defaults(func=cmd_interp)

    oracle = subs.add_parser("oracle", help="spectral blowup-norm table")
    oracle.add_argument("--modes", default="1,5,10,50",
                        help="comma-separated truncation counts")
    oracle.add_argument("--T", type=float, default=1.0)
    oracle.add_argument("--out")
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, harness.FitError,
            dpg_core.AssemblyError, dpg_core.SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
