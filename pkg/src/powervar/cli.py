import argparse
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from powervar.core.errors import InputValidationError, InvalidArgumentError
from powervar.core.generators import generate
from powervar.core.hypothesis import run_test
from powervar.core.models import ProcessKind, ProcessSpec, TestConfig
from powervar.core.runtime.engine import MonteCarloEngine, run_table
from powervar.core.runtime.helpers import TableConfig
from powervar.core.spectral import signal_amplitudes
from powervar.core.stats import expected_null_power_variance
from powervar.settings import CLI_SETTINGS, HYPOTHESIS_SETTINGS, MONTECARLO_SETTINGS
from powervar.util.serialize import ResultDocument
from powervar.util.logging import configure_logging
from powervar.util.signal_io import ingest, write_signal
from powervar.util.tables import (
    sidecar_paths,
    write_histogram,
    write_null_samples,
    write_report,
    write_table,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_USAGE_ERROR = 3

SIDED_CHOICES = ("two", "high", "low", "two_sided", "high_tail", "low_tail")


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 3 (argparse uses 2)."""
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE_ERROR, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    raw = os.environ.get(CLI_SETTINGS.seed_env)
    if raw is None or raw == "":
        return CLI_SETTINGS.default_seed
    try:
        return int(raw)
    except ValueError:
        raise InvalidArgumentError(f"{CLI_SETTINGS.seed_env}={raw!r} is not an integer") from None


def _parse_param(item: str) -> tuple[str, object]:
    """'key=value' with value read as int, float, a comma-separated float tuple, or text."""
    try:
        key, raw = item.split("=", 1)
    except ValueError:
        raise InvalidArgumentError(f"Invalid parameter {item!r}. Use 'key=value'.") from None
    raw = raw.strip()
    if "," in raw:
        try:
            return key.strip(), tuple(float(v) for v in raw.split(","))
        except ValueError:
            raise InvalidArgumentError(f"Invalid tuple value in {item!r}") from None
    for cast in (int, float):
        try:
            return key.strip(), cast(raw)
        except ValueError:
            continue
    return key.strip(), raw


def _common_parser() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    # debug
    common.add_argument("--debug", action="store_true",
                        help="Debug mode. Provides verbose runtime output and information")
    # verbose
    common.add_argument("--verbose", action="store_true",
                        help="Verbose mode. Prints CLI level information to stderr")
    return common


def build_parser() -> ArgumentParser:
    common = _common_parser()
    arg_parser = ArgumentParser(
        prog="powervar",
        description="Bootstrap power variance test for nonstationarity in complex-valued signals.",
    )
    sub = arg_parser.add_subparsers(dest="command", required=True)

    # ---- test ----
    p_test = sub.add_parser("test", parents=[common], help="Test signal files for stationarity")
    p_test.add_argument("paths", nargs="+", help="Signal files ('re,im' per line)")
    p_test.add_argument("-B", "--replicates", type=int, dest="replicates",
                        default=HYPOTHESIS_SETTINGS.replicates,
                        help="Number of bootstrap replicates")
    p_test.add_argument("--alpha", type=float, default=HYPOTHESIS_SETTINGS.alpha,
                        help="Significance level")
    p_test.add_argument("--sided", choices=SIDED_CHOICES, default=HYPOTHESIS_SETTINGS.sided,
                        help="two: p = 2 min(q, r); high: p = q; low: p = r")
    p_test.add_argument("--seed", type=int, default=None,
                        help=f"Bootstrap seed (default ${CLI_SETTINGS.seed_env} or 0)")
    p_test.add_argument("--demean", action="store_true",
                        help="Subtract the complex sample mean before testing")
    p_test.add_argument("--differentiate", action="store_true",
                        help="Inputs hold positions; test their first differences")
    p_test.add_argument("--emit-null", metavar="PATH",
                        help="Write the surrogate power variances to a csv file")
    p_test.add_argument("--no-fast-path", action="store_true",
                        help="Always run the bootstrap, even when the analytic null mean "
                             "settles a one-sided test")
    p_test.add_argument("--workers", type=int, default=None,
                        help="Threads evaluating surrogates")
    p_test.add_argument("--timestamp", action="store_true",
                        help="Add a UTC timestamp to each result document")

    # ---- generate ----
    p_gen = sub.add_parser("generate", parents=[common], help="Write a synthetic signal file")
    p_gen.add_argument("kind", choices=[k.value for k in ProcessKind])
    p_gen.add_argument("-n", "--n", type=int, required=True, help="Signal length")
    p_gen.add_argument("--seed", type=int, default=None, help="Generator seed")
    p_gen.add_argument("-o", "--out", required=True, help="Output csv path")
    p_gen.add_argument("--param", action="append", dest="param_list", default=[],
                       help="Override a process parameter (e.g. 'noise_scale=0'). Repeatable.")

    # ---- montecarlo ----
    p_mc = sub.add_parser("montecarlo", parents=[common], help="Rejection-rate table")
    p_mc.add_argument("--process", action="append", dest="processes",
                      choices=[k.value for k in ProcessKind],
                      help="Process kind (repeatable; default all)")
    p_mc.add_argument("--n", action="append", dest="lengths", type=int,
                      help="Signal length (repeatable; default 10..1000 grid)")
    p_mc.add_argument("--trials", type=int, default=None,
                      help="Trials per cell (default 1000 for ar1, 500 otherwise)")
    p_mc.add_argument("-B", "--replicates", type=int, dest="replicates", default=None,
                      help="Bootstrap replicates per test "
                           f"(default {MONTECARLO_SETTINGS.replicates})")
    p_mc.add_argument("--sided", choices=SIDED_CHOICES, default=None,
                      help="Override the per-process sidedness")
    p_mc.add_argument("--alpha", type=float, default=HYPOTHESIS_SETTINGS.alpha)
    p_mc.add_argument("--seed", type=int, default=None, help="Master seed")
    p_mc.add_argument("--full-scale", action="store_true",
                      help="10,000 trials and B=1000 per cell")
    p_mc.add_argument("--concurrency", type=int, default=MONTECARLO_SETTINGS.concurrency,
                      help="Trials run in parallel")
    p_mc.add_argument("--bins", type=int, default=MONTECARLO_SETTINGS.histogram_bins,
                      help="p-value histogram bins")
    p_mc.add_argument("--fast-path", action="store_true",
                      help="Let one-sided trials skip the bootstrap (distorts histograms)")
    p_mc.add_argument("--progress", action="store_true", help="Show a progress bar")
    p_mc.add_argument("-o", "--out",
                      help="Report csv path; histograms and table are written next to it. "
                           "Without it the report goes to stdout.")

    # ---- expectation ----
    p_exp = sub.add_parser("expectation", parents=[common],
                           help="Print the analytic surrogate mean power variance")
    p_exp.add_argument("path", help="Signal file")
    p_exp.add_argument("--demean", action="store_true")
    p_exp.add_argument("--differentiate", action="store_true")

    return arg_parser


def _null_path(base: str, source: Path, many: bool) -> Path:
    base = Path(base)
    if not many:
        return base
    return base.with_name(f"{base.with_suffix('').name}.{source.stem}{base.suffix or '.csv'}")


def cmd_test(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    config = TestConfig(
        replicates=args.replicates,
        alpha=args.alpha,
        sided=args.sided,
        seed=seed,
        demean=args.demean,
        # the sidecar needs the bootstrap samples
        fast_path=not (args.no_fast_path or args.emit_null),
    )
    if args.workers is not None and args.workers < 1:
        raise InvalidArgumentError("--workers must be >= 1")
    if args.verbose:
        print(f"Using config: {config}", file=sys.stderr)

    # ingest everything up front so a bad file fails before any output
    signals = [(Path(p), ingest(p, differentiate=args.differentiate)) for p in args.paths]
    many = len(signals) > 1
    for path, signal in signals:
        result = run_test(signal, config, workers=args.workers)
        stamp = datetime.now(timezone.utc).isoformat() if args.timestamp else None
        doc = ResultDocument.from_result(result, file=str(path), timestamp=stamp)
        print(doc.to_json(), flush=True)
        if args.emit_null:
            write_null_samples(result.null_samples, _null_path(args.emit_null, path, many))
    return EXIT_OK


def cmd_generate(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    params = dict(_parse_param(item) for item in args.param_list)
    spec = ProcessSpec(kind=args.kind, n=args.n, seed=seed, params=params)
    signal = generate(spec)
    write_signal(args.out, signal)
    if args.verbose:
        print(f"Wrote {spec.kind} n={spec.n} seed={spec.seed} to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    table = TableConfig(
        processes=args.processes,
        lengths=args.lengths,
        trials=args.trials,
        replicates=args.replicates,
        master_seed=seed,
        full_scale=args.full_scale,
        sided=args.sided,
    )
    if args.concurrency < 1 or args.bins < 1:
        raise InvalidArgumentError("--concurrency and --bins must be >= 1")
    if not 0.0 < args.alpha < 1.0:
        raise InvalidArgumentError(f"alpha must lie in (0, 1), got {args.alpha}")

    engine = MonteCarloEngine(
        concurrency=args.concurrency, alpha=args.alpha, fast_path=args.fast_path
    )
    report = run_table(table, progress=args.progress, engine=engine)

    if args.out:
        write_report(report, args.out)
        paths = sidecar_paths(args.out, report)
        write_table(report, paths["table"])
        for cell in report.cells:
            write_histogram(cell, paths["histograms"][(cell.kind, cell.n)], bins=args.bins)
    else:
        write_report(report, sys.stdout)

    if args.verbose:
        print("Done. Printing engine stats", file=sys.stderr)
        print(engine.stats, file=sys.stderr)
    return EXIT_OK


def cmd_expectation(args) -> int:
    signal = ingest(args.path, differentiate=args.differentiate)
    if args.demean:
        signal = signal.demeaned()
    print(repr(expected_null_power_variance(signal_amplitudes(signal))), flush=True)
    return EXIT_OK


COMMANDS = {
    "test": cmd_test,
    "generate": cmd_generate,
    "montecarlo": cmd_montecarlo,
    "expectation": cmd_expectation,
}


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv``, dispatch, and return the process exit code."""
    arg_parser = build_parser()
    try:
        args = arg_parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE_ERROR

    if args.debug:
        configure_logging('DEBUG')

    try:
        return COMMANDS[args.command](args)
    except InvalidArgumentError as exc:
        print(f"powervar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE_ERROR
    except (InputValidationError, OSError) as exc:
        print(f"powervar: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except BrokenPipeError:
        if args.verbose:
            print("Pipe broken.", file=sys.stderr)
        return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
