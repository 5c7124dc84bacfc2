"""Command-line entry point: ``midas-specd {test,simulate,mc,oracle}``.

Exit status is 2 for bad arguments, 1 for data or numerical errors and 0
otherwise.  Rejecting the null is a result, not an error.
"""
import argparse
import csv
import io
import os
import sys

from .covariance import HacOptions
from .dataio import load_sample, save_sample
from .dgp import DgpSpec, simulate
from .exceptions import DataError, InvalidParameter, MidasSpecError
from .harness import GridConfig, preset, render_table, run_grid
from .oracle import decay_rows
from .spectests import METHODS, PreparedTests
from .weights import parse_null

SEED_ENV = "MIDAS_SPECD_SEED"


class _UsageError(Exception):
    pass


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise _UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="midas-specd",
        description="Specification tests of fixed-weight aggregation against MIDAS weights.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the tests on a data set")
    p.add_argument("--low", required=True, help="CSV with columns period_id,y")
    p.add_argument("--high", required=True, help="CSV with columns period_id,lag_index,x")
    p.add_argument("--m", type=int, help="frequency ratio (inferred when omitted)")
    p.add_argument("--null", default="flat", help="flat or eop:w1,w2,...")
    p.add_argument("--method", default="all", choices=list(METHODS) + ["all"])
    p.add_argument("--hac-bandwidth", type=int, help="Bartlett lag count (default Newey-West rule)")
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--out", help="also write the results as CSV to this file")

    p = sub.add_parser("simulate", help="write a simulated sample")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=float, default=0.0, help="AR(1) coefficient of the error")
    p.add_argument("--d", type=float, default=0.0, help="AR(1) coefficient of the regressor")
    p.add_argument("--beta", type=float, default=10.0)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--seed", type=int)
    p.add_argument("--low", required=True)
    p.add_argument("--high", required=True)

    p = sub.add_parser("mc", help="Monte Carlo rejection-rate table")
    p.add_argument("--preset", choices=["desk", "full"])
    p.add_argument("--methods", help="comma-separated subset of new,agk,miller,lambda")
    p.add_argument("--T", dest="T_values", type=_int_list)
    p.add_argument("--m", dest="m_values", type=_int_list)
    p.add_argument("--c", dest="c_values", type=_float_list)
    p.add_argument("--d", dest="d_values", type=_float_list)
    p.add_argument("--k", dest="k_values", type=_float_list)
    p.add_argument("--null")
    p.add_argument("--hac-bandwidth", type=int)
    p.add_argument("--level", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", default="csv", choices=["csv", "md"])
    p.add_argument("--out")
    p.add_argument("--progress", action="store_true", help="report progress on stderr")

    p = sub.add_parser("oracle", help="population instrument-error covariance against m")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--beta1", type=float, default=10.0)
    p.add_argument("--null", default="flat")
    p.add_argument("--m-list", type=_int_list, default=(32, 64, 128, 256))
    p.add_argument("--reps", type=int, default=0, help="Monte Carlo replications (0 = analytic only)")
    p.add_argument("--T", type=int, default=200, help="sample length of each Monte Carlo draw")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    return parser


def _emit(text, out):
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_test(args):
    if not 0.0 < args.level < 1.0:
        raise _UsageError("--level must lie in (0, 1)")
    try:
        hac = HacOptions(bandwidth=args.hac_bandwidth)
    except InvalidParameter as exc:
        raise _UsageError(str(exc)) from None
    sample = load_sample(args.low, args.high, args.m)
    try:
        null = parse_null(args.null, sample.m)
    except InvalidParameter as exc:
        raise _UsageError(str(exc)) from None
    prepared = PreparedTests(sample.x_high, null, hac)
    methods = METHODS if args.method == "all" else (args.method,)
    rows = []
    failed = False
    for meth in methods:
        try:
            out = prepared.run(meth, sample.y)
        except MidasSpecError as exc:
            failed = True
            rows.append([meth, "nan", "", "nan", "", "nan", f"error: {exc}"])
            continue
        rows.append([meth, repr(float(out.statistic)), out.df, repr(float(out.p_value)),
                     str(out.rejects(args.level)).lower(), repr(float(out.estimate)),
                     ";".join(sorted(d.value for d in out.diagnostics))])
    header = ["method", "statistic", "df", "p_value", "reject", "estimate", "diagnostics"]
    print(f"T={sample.T} m={sample.m} null={args.null} level={args.level} "
          f"bandwidth={hac.lags_for(sample.T)}")
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip())
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        _emit(buf.getvalue(), args.out)
    return 1 if failed else 0


def _cmd_simulate(args, seed):
    try:
        spec = DgpSpec(T=args.T, m=args.m, c=args.c, d=args.d, beta=args.beta,
                       theta=args.theta, seed=seed, burn_in=args.burn_in)
    except InvalidParameter as exc:
        raise _UsageError(str(exc)) from None
    save_sample(simulate(spec), args.low, args.high)
    return 0


def _cmd_mc(args, seed):
    overrides = {"base_seed": seed}
    for name in ("T_values", "m_values", "c_values", "d_values", "k_values"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.methods:
        overrides["methods"] = tuple(m for m in args.methods.split(",") if m.strip())
    if args.null is not None:
        overrides["null"] = args.null
    if args.hac_bandwidth is not None:
        overrides["hac_bandwidth"] = args.hac_bandwidth
    if args.level is not None:
        overrides["nominal_level"] = args.level
    if args.reps is not None:
        overrides["replications"] = args.reps
    try:
        if args.preset:
            config = preset(args.preset, **overrides)
        else:
            config = GridConfig(**overrides)
        for m in config.m_values:
            parse_null(config.null, m)
        HacOptions(bandwidth=config.hac_bandwidth)
    except InvalidParameter as exc:
        raise _UsageError(str(exc)) from None
    progress = None
    if args.progress:
        def progress(done, total):
            print(f"\r{done}/{total} blocks", end="" if done < total else "\n",
                  file=sys.stderr, flush=True)
    table = run_grid(config, workers=args.workers, progress=progress)
    _emit(render_table(table, args.format), args.out)
    return 0


def _cmd_oracle(args, seed):
    try:
        rows = decay_rows(args.theta, args.d, args.beta1, args.null, args.m_list,
                          replications=args.reps, T=args.T, seed=seed)
    except InvalidParameter as exc:
        raise _UsageError(str(exc)) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "instrument", "analytic", "mc_mean", "mc_se", "analytic_times_m"])
    for m, r, value, mean, se, scaled in rows:
        w.writerow([m, r, repr(float(value)), repr(float(mean)), repr(float(se)), repr(float(scaled))])
    _emit(buf.getvalue(), args.out)
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        seed = getattr(args, "seed", None)
        if seed is None:
            seed = _default_seed()
        if args.command == "test":
            return _cmd_test(args)
        if args.command == "simulate":
            return _cmd_simulate(args, seed)
        if args.command == "mc":
            return _cmd_mc(args, seed)
        return _cmd_oracle(args, seed)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"midas-specd: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, MidasSpecError, OSError) as exc:
        print(f"midas-specd: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
