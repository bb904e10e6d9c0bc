"""Command-line interface: ``mmcmax {approx,erlang,simulate,compare,oracle,reproduce-paper}``.

Exit codes: 0 success, 2 validation error, 3 numeric-limit or oracle-scale error.
"""

from __future__ import annotations

import argparse
import os
import sys
from decimal import ROUND_DOWN, Decimal
from fractions import Fraction

from . import __version__
from .clumping import MaxCdfApprox, Order, gumbel_moments
from .errors import NumericLimitError, ValidationError
from .harness import ExperimentSpec, compare, emit_report, load_report, run_experiment
from .queue_model import (
    QueueParams,
    erlang_a_all_busy,
    erlang_b_blocking,
    erlang_c_all_busy,
)
from .simulator import CountConvention, exact_max_cdf

EXIT_VALIDATION = 2
EXIT_NUMERIC = 3

PAPER_HORIZONS = (1000, 2500)
PAPER_SERVERS = (1, 2, 3, 4, 5)


def paper_params(c: int) -> QueueParams:
    """lam = 1/3 and mu = 1/(2c), so rho = 2/3 for every c."""
    return QueueParams(c, 1 / 3, 1 / (2 * c))


def rate(text: str) -> float:
    """Parse a decimal or a fraction such as ``1/3``."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        try:
            return float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from None
    return float(value)


def digits(x: float, places: int = 10) -> str:
    """Format with ``places`` decimals, truncated toward zero (not rounded)."""
    return str(Decimal(repr(x)).quantize(Decimal(1).scaleb(-places), rounding=ROUND_DOWN))


def _add_queue_args(p, theta=False):
    p.add_argument("--c", type=int, required=True, help="number of servers")
    p.add_argument("--lambda", dest="lam", type=rate, required=True, help="arrival rate")
    p.add_argument("--mu", type=rate, required=True, help="per-server service rate")
    if theta:
        p.add_argument("--theta", type=rate, default=None,
                       help="abandonment rate (Erlang A); 'inf' gives Erlang B")


def _add_run_args(p):
    p.add_argument("--replicates", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0, help="master seed (unsigned 64-bit)")
    p.add_argument("--convention", choices=[c.value for c in CountConvention],
                   default=CountConvention.IN_SYSTEM.value)
    p.add_argument("--workers", type=int, default=1)


def _write(data: bytes, out: str | None, default_name: str) -> str | None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return None
    path = os.path.join(out, default_name) if os.path.isdir(out) else out
    with open(path, "wb") as fh:
        fh.write(data)
    return path


def cmd_approx(args) -> int:
    params = QueueParams(args.c, args.lam, args.mu)
    params.require_stable()
    if not args.n > 0:
        raise ValidationError("--n must be positive")
    orders = [Order.LOW, Order.HIGH] if args.order == "both" else [Order(args.order)]
    tables = {o: MaxCdfApprox(params, args.n, o) for o in orders}
    m_max = args.m_max
    if m_max is None:
        m_max = max(t.support_end(1e-6) for t in tables.values())
    rendered = {o: t.table(m_max) for o, t in tables.items()}
    moments = gumbel_moments(params)

    lines = [f"# M/M/{params.c}  lambda={params.lam:.10g}  mu={params.mu:.10g}  "
             f"rho={params.rho:.10g}  n={args.n:g}"]
    header = ["m"]
    for o in orders:
        header += [f"cdf_{o.value}", f"pmf_{o.value}"]
    lines.append("\t".join(header))
    for m in range(m_max + 1):
        row = [str(m)]
        for o in orders:
            row += [f"{rendered[o].cdf[m]:.10g}", f"{rendered[o].pmf[m]:.10g}"]
        lines.append("\t".join(row))
    for o in orders:
        lines += [f"# flag: {f}" for f in rendered[o].flags]
    lines.append(f"slope\t{digits(moments.slope)}")
    lines.append(f"intercept\t{digits(moments.intercept)}")
    lines.append(f"mean\t{moments.mean(args.n):.10f}")
    lines.append(f"variance\t{moments.variance:.10f}")
    print("\n".join(lines))
    return 0


def cmd_erlang(args) -> int:
    params = QueueParams(args.c, args.lam, args.mu, theta=args.theta)
    if args.model == "c":
        value = erlang_c_all_busy(params)
    elif args.model == "b":
        value = erlang_b_blocking(params)
    else:
        if args.theta is None:
            raise ValidationError("--model a needs --theta")
        value = erlang_a_all_busy(params)
    print(f"{value:.6f}" if not args.full else repr(value))
    return 0


def _summary(report) -> str:
    return (f"tv_low={report.tv_low:.6f} tv_high={report.tv_high:.6f} "
            f"emp_mean={report.emp_mean:.4f} heur_mean={report.heur_mean:.4f} "
            f"emp_var={report.emp_var:.4f} heur_var={report.heur_var:.4f}")


def cmd_simulate(args) -> int:
    spec = ExperimentSpec(
        params=QueueParams(args.c, args.lam, args.mu),
        horizon_n=args.horizon,
        replicates=args.replicates,
        master_seed=args.seed,
        count_convention=CountConvention(args.convention),
    )
    spec.params.require_stable()  # the comparison needs the approximations
    if args.workers < 1:
        raise ValidationError("--workers must be >= 1")
    empirical = run_experiment(spec, workers=args.workers)
    report = compare(empirical)
    data = emit_report(empirical, report, args.format)
    path = _write(data, args.out, f"{spec.file_stem()}.{args.format}")
    if path is not None:
        print(f"{path}: {_summary(report)}")
    return 0


def cmd_compare(args) -> int:
    empirical = load_report(args.input)
    report = compare(empirical)
    if args.out is not None:
        data = emit_report(empirical, report, args.format)
        _write(data, args.out, f"{empirical.spec.file_stem()}.{args.format}")
    print(_summary(report))
    for flag in report.flags:
        print(f"flag: {flag}")
    return 0


def cmd_oracle(args) -> int:
    params = QueueParams(args.c, args.lam, args.mu)
    value = exact_max_cdf(params, args.horizon, args.m, args.initial_state)
    print(repr(value))
    return 0


def cmd_reproduce(args) -> int:
    if args.workers < 1:
        raise ValidationError("--workers must be >= 1")
    if args.out_dir is not None and not os.path.isdir(args.out_dir):
        raise ValidationError(f"--out-dir {args.out_dir!r} is not a directory")
    convention = CountConvention(args.convention)
    horizons = args.horizons
    specs = [ExperimentSpec(paper_params(c), n, args.replicates, args.seed, convention)
             for n in horizons for c in PAPER_SERVERS]

    lines = ["# mean ~ slope*ln(n) + intercept, variance constant (digits truncated)",
             "c\tlambda\tmu\tslope\tintercept\tvariance"]
    for c in PAPER_SERVERS:
        p = paper_params(c)
        g = gumbel_moments(p)
        lines.append(f"{c}\t1/3\t1/{2 * c}\t{digits(g.slope)}\t{digits(g.intercept)}\t{g.variance:.10f}")
    lam_n = horizons[0]
    means = {c: gumbel_moments(paper_params(c)).mean(lam_n) for c in PAPER_SERVERS}
    best = min(means, key=means.get)
    lines.append(f"# fastest single server has the smallest estimated mean at n={lam_n:g}: "
                 f"{'yes' if best == 1 else 'no'} (c={best})")

    results = {}
    for spec in specs:
        empirical = run_experiment(spec, workers=args.workers)
        results[(spec.params.c, spec.horizon_n)] = (spec, empirical, compare(empirical))

    lines.append(f"# R={args.replicates} seed={args.seed} convention={convention.value}")
    lines.append("c\tn\ttv_low\ttv_high\thigh_closer\temp_mean\theur_mean\temp_var\theur_var")
    for (c, n), (spec, empirical, rep) in results.items():
        lines.append(
            f"{c}\t{n:g}\t{rep.tv_low:.6f}\t{rep.tv_high:.6f}\t{rep.tv_high <= rep.tv_low}\t"
            f"{rep.emp_mean:.4f}\t{rep.heur_mean:.4f}\t{rep.emp_var:.4f}\t{rep.heur_var:.4f}"
        )
    if len(horizons) > 1:
        lines.append("c\tn_small\tn_large\ttv_high_shrinks")
        lo_n, hi_n = min(horizons), max(horizons)
        for c in PAPER_SERVERS:
            shrinks = results[(c, float(hi_n))][2].tv_high <= results[(c, float(lo_n))][2].tv_high
            lines.append(f"{c}\t{lo_n:g}\t{hi_n:g}\t{shrinks}")

    if args.out_dir is not None:
        for spec, empirical, rep in results.values():
            for fmt in ("csv", "json"):
                path = os.path.join(args.out_dir, f"{spec.file_stem()}.{fmt}")
                with open(path, "wb") as fh:
                    fh.write(emit_report(empirical, rep, fmt))
    print("\n".join(lines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmcmax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="clumping CDF/pmf table and moment estimates")
    _add_queue_args(p)
    p.add_argument("--n", type=rate, required=True, help="time horizon")
    p.add_argument("--order", choices=["low", "high", "both"], default="both")
    p.add_argument("--m-max", type=int, default=None)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("erlang", help="Erlang A/B/C all-busy or blocking probability")
    p.add_argument("--model", choices=["a", "b", "c"], required=True)
    _add_queue_args(p, theta=True)
    p.add_argument("--full", action="store_true", help="print full precision")
    p.set_defaults(func=cmd_erlang)

    p = sub.add_parser("simulate", help="Monte Carlo experiment with comparison report")
    _add_queue_args(p)
    p.add_argument("--horizon", type=rate, required=True)
    _add_run_args(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None, help="output file or directory (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="recompute the comparison for a saved JSON report")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="exact P{max number in system <= m} by uniformization")
    _add_queue_args(p)
    p.add_argument("--horizon", type=rate, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--initial-state", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("reproduce-paper",
                       help="all (n, c) cells with lam=1/3, mu=1/(2c), n in {1000, 2500}")
    _add_run_args(p)
    p.set_defaults(convention=CountConvention.IN_SYSTEM_MINUS_ONE.value)
    p.add_argument("--horizons", type=rate, nargs="+", default=list(PAPER_HORIZONS))
    p.add_argument("--out-dir", default=None, help="write per-cell CSV and JSON here")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
