"""Command-line interface: ``elmpi synth | run | eval``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 numeric failure.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

from .config import load_config
from .exceptions import ConfigError, DataError, NumericError
from .experiment import run_experiment, write_outputs
from .metrics import IntervalForecast, PiConfig, evaluate, report_row
from .series import synthesize, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

logger = logging.getLogger("elmpi")


def _exit_code(exc):
    cause = getattr(exc, "cause", exc)
    if isinstance(cause, ConfigError):
        return EXIT_CONFIG
    if isinstance(cause, NumericError) or isinstance(cause, ArithmeticError):
        return EXIT_NUMERIC
    if isinstance(cause, (DataError, OSError, ValueError)):
        return EXIT_DATA
    return EXIT_NUMERIC


def cmd_synth(args):
    cfg = load_config(args.config, args.seed)
    days = args.days if args.days is not None else cfg.synth_days
    series = synthesize(days, cfg.seed, cfg.synth_profile)
    out = Path(args.out)
    if out.suffix.lower() != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "series.csv"
    write_csv(series, out)
    print(f"wrote {len(series)} rows to {out}")
    return EXIT_OK


def cmd_run(args):
    cfg = load_config(args.config, args.seed)
    result = run_experiment(cfg)
    out = write_outputs(result, cfg, args.out)
    print(f"wrote {len(result.rows)} report rows to {out / 'report.tsv'}")
    return EXIT_OK


def read_bounds_csv(path):
    """Parse an ``index,lower,upper,actual[,covered]`` file."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    lower, upper, actual = [], [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        needed = {"lower", "upper", "actual"}
        if reader.fieldnames is None or not needed <= set(reader.fieldnames):
            raise DataError(f"{path}: header must contain index,lower,upper,actual")
        for row in reader:
            idx = row.get("index", str(len(lower)))
            try:
                lo, hi, y = float(row["lower"]), float(row["upper"]), float(row["actual"])
            except (TypeError, ValueError):
                raise DataError(f"{path}: malformed row at index {idx}") from None
            if lo > hi:
                raise DataError(f"{path}: lower > upper at index {idx}")
            if row.get("covered") not in (None, ""):
                if int(row["covered"]) != int(lo <= y <= hi):
                    raise DataError(f"{path}: covered flag inconsistent at index {idx}")
            lower.append(lo)
            upper.append(hi)
            actual.append(y)
    if not lower:
        raise DataError(f"{path}: no data rows")
    return lower, upper, actual


def cmd_eval(args):
    cfg = load_config(args.config, None)
    if args.pinc is None:
        raise ConfigError("--pinc is required")
    pinc = args.pinc / 100.0 if args.pinc > 1 else args.pinc
    pi = PiConfig.from_pinc(pinc)
    try:
        w = cfg.weights_for(pinc)
    except KeyError:
        raise ConfigError(f"no sharpness weights configured for PINC {pinc}") from None
    lower, upper, actual = read_bounds_csv(args.bounds)
    ev = evaluate(IntervalForecast(lower, upper, actual, pi), w, cfg.objective_weights)
    row = report_row(args.model, ev, cfg.objective_weights)
    print("\t".join(["model", "pinc", "reliability", "sharpness", "objective", "picp", "mpil"]))
    print("\t".join(row))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="elmpi", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_help):
        p.add_argument("--config", type=Path, default=None, help="JSON config (defaults if omitted)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", type=Path, default=Path("."), help=out_help)

    p = sub.add_parser("synth", help="write a synthetic hourly series as CSV")
    common(p, "output directory (series.csv) or .csv path")
    p.add_argument("--days", type=int, default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="train all models and write reports")
    common(p, "output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="score a bounds CSV")
    p.add_argument("bounds", type=Path)
    p.add_argument("--pinc", type=float, default=None, help="nominal level, e.g. 0.9 or 90")
    p.add_argument("--model", default="external")
    p.add_argument("--config", type=Path, default=None)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped to documented exit codes
        code = _exit_code(exc)
        print(f"elmpi: error: {exc}", file=sys.stderr)
        if code == EXIT_NUMERIC and not isinstance(getattr(exc, "cause", exc), (NumericError, ArithmeticError)):
            logger.debug("unexpected error", exc_info=True)
        return code


if __name__ == "__main__":
    sys.exit(main())
