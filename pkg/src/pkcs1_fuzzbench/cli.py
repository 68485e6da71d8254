# The PKCS#1 v1.5 Fuzzer Evaluation Bench (fuzzbench) toolset.
#
# Copyright (C) 2024, The fuzzbench authors
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.
"""
Command line interface: ``serve``, ``run``, ``generate`` and ``analyze``.

Exit codes are 0 on success, 1 for usage and configuration errors and 2 for
runtime failures.
"""

import logging
import signal
import sys
import threading
from argparse import ArgumentParser, Namespace
from itertools import islice
from pathlib import Path
from typing import Callable, NoReturn, Optional, Sequence

from tabulate import tabulate
from tqdm import tqdm

from . import __version__
from .controller import (
    CampaignError,
    CampaignSummary,
    ConfigError,
    load_config,
    read_summary,
    run_many,
)
from .eval import Evaluator, InsufficientRecordsError, LoggedRun, RecordGroup, revalidate
from .eval.diversity import DEFAULT_REPETITIONS, DEFAULT_SAMPLE_SIZE
from .eval.series import DEFAULT_BUCKET_SECONDS
from .generators import (
    GeneratorConfigError,
    GeneratorStrategy,
    MutationConfig,
    build_generator,
    generator_types,
    load_seed_corpus,
    write_inputs,
)
from .pkcs1 import types as TT
from .pkcs1.rsa import KeyFormatError
from .validator import ValidatorService, ValidatorStartupError, serve

LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class _ArgumentParser(ArgumentParser):
    """Argument parser exiting with the usage error code."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _oracle_params(args: Namespace) -> TT.OracleParams:
    try:
        return TT.OracleParams(mod_len=args.mod_len, min_ps_len=args.min_ps_len)
    except ValueError as exc:
        raise ConfigError(str(exc), "--mod-len/--min-ps-len") from exc


def cmd_serve(
    args: Namespace,
    stop: Optional[threading.Event] = None,
    on_ready: Optional[Callable[[ValidatorService], None]] = None,
) -> int:
    """Run a standalone validator until interrupted or ``stop`` is set."""
    params = _oracle_params(args)
    stop = stop or threading.Event()
    previous = {}
    if threading.current_thread() is threading.main_thread():
        for signum in (signal.SIGINT, signal.SIGTERM):
            previous[signum] = signal.signal(signum, lambda *_: stop.set())

    try:
        service = serve(args.port, params, args.log, args.campaign_id, args.host)
        try:
            print(f"Validator listening on {args.host}:{service.port}, logging to {args.log}")
            if on_ready is not None:
                on_ready(service)
            while not stop.wait(0.5):
                pass
        finally:
            records = service.shutdown()
    finally:
        for signum, handler in previous.items():
            signal.signal(signum, handler)
    print(f"Validator stopped after {records} records")
    return EXIT_OK


def cmd_run(args: Namespace) -> int:
    """Run every campaign of a configuration file."""
    configs = load_config(args.config)
    summaries = run_many(configs, args.parallelism, args.progress)
    rows = [
        [summary.campaign_id, summary.records_written, summary.wall_seconds, summary.throughput]
        for summary in summaries
    ]
    print(
        tabulate(
            rows,
            headers=["Campaign", "Records", "Seconds", "Inputs/s"],
            floatfmt=".2f",
        )
    )
    return EXIT_OK


def cmd_generate(args: Namespace) -> int:
    """Write inputs of a built-in generator, one file each."""
    strategy = GeneratorStrategy.from_name(args.strategy)
    params = _oracle_params(args)

    mutation = None
    if strategy is GeneratorStrategy.MUTATION:
        if args.seed_dir is None:
            raise GeneratorConfigError("The mutation strategy needs --seed-dir")
        mutation = MutationConfig(
            deterministic_stage_enabled=not args.no_deterministic,
            havoc_stacking_max=args.havoc_stacking_max,
            seed_corpus=load_seed_corpus(args.seed_dir),
        )
    generator = build_generator(
        strategy, params, args.rng_seed, mutation=mutation, mutation_rate=args.mutation_rate
    )
    generator.reset()
    inputs = tqdm(
        islice(generator.stream(), args.count),
        total=args.count,
        unit="input",
        disable=not args.progress,
    )
    width = max(6, len(str(max(args.count - 1, 0))))
    written = write_inputs(inputs, args.out, width)
    print(f"Wrote {written} inputs to {args.out}")
    return EXIT_OK


def _run_summary(run: LoggedRun) -> Optional[CampaignSummary]:
    if run.source is None:
        return None
    summary = read_summary(run.source)
    if summary is None or summary.campaign_id != run.campaign_id:
        return None
    return summary


def cmd_analyze(args: Namespace) -> int:
    """Compute the metrics of campaign logs and export the report."""
    if args.sample < 2:
        raise ConfigError(f"at least 2 inputs per sample needed, got {args.sample}", "--sample")
    group = RecordGroup.from_logs(args.logs)
    if not group.records:
        raise InsufficientRecordsError("The logs hold no records")

    evaluator = Evaluator(
        sample_size=args.sample,
        repetitions=args.reps,
        bucket_seconds=args.bucket,
        rng_seed=args.rng_seed,
        progress=args.progress,
    )
    for name, run_ids in group.groups().items():
        for run_id in run_ids:
            run = group.run(run_id)
            evaluator.update(run_id, run.records, _run_summary(run), group=name)
    report = evaluator.summarise()

    if args.mod_len is not None or args.min_ps_len is not None:
        if args.mod_len is None:
            args.mod_len = TT.DEFAULT_MOD_LEN
        if args.min_ps_len is None:
            args.min_ps_len = TT.DEFAULT_MIN_PS_LEN
        params = _oracle_params(args)
        report.revalidation_mismatches = len(revalidate(group.records, params))
        if report.revalidation_mismatches:
            LOGGER.warning(
                "%d records disagree with the oracle for %s",
                report.revalidation_mismatches,
                params,
            )

    print(report.headline_table())
    if args.out_json is not None:
        report.write_json(args.out_json)
    if args.out_csv is not None:
        report.write_csv(args.out_csv)
    if args.out_tsv is not None:
        report.write_tsv(args.out_tsv)
    return EXIT_OK


def build_parser() -> ArgumentParser:
    parser = _ArgumentParser(
        prog="fuzzbench", description="PKCS#1 v1.5 fuzzer evaluation bench."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log debug messages."
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="<COMMAND>")

    serve_parser = subparsers.add_parser("serve", help="Run a standalone validator.")
    serve_parser.add_argument(
        "--port", type=int, default=9000, help="TCP port, 0 picks a free one. Default: 9000"
    )
    serve_parser.add_argument("--host", default="127.0.0.1", help="Interface to listen on.")
    serve_parser.add_argument("--mod-len", type=int, default=TT.DEFAULT_MOD_LEN)
    serve_parser.add_argument("--min-ps-len", type=int, default=TT.DEFAULT_MIN_PS_LEN)
    serve_parser.add_argument(
        "--log", type=Path, required=True, help="JSON Lines log.", metavar="<PATH TO FILE>"
    )
    serve_parser.add_argument("--campaign-id", default="manual")
    serve_parser.set_defaults(handler=cmd_serve)

    run_parser = subparsers.add_parser("run", help="Run the campaigns of a TOML file.")
    run_parser.add_argument("--config", type=Path, required=True, metavar="<PATH TO FILE>")
    run_parser.add_argument("--parallelism", type=_positive_int, default=1)
    run_parser.add_argument("--progress", action="store_true", help="Show progress bars.")
    run_parser.set_defaults(handler=cmd_run)

    generate_parser = subparsers.add_parser("generate", help="Write generated inputs.")
    generate_parser.add_argument(
        "--strategy", required=True, choices=[cls.strategy.value for cls in generator_types]
    )
    generate_parser.add_argument("--count", type=_positive_int, required=True)
    generate_parser.add_argument("--mod-len", type=int, default=TT.DEFAULT_MOD_LEN)
    generate_parser.add_argument("--min-ps-len", type=int, default=TT.DEFAULT_MIN_PS_LEN)
    generate_parser.add_argument("--seed-dir", type=Path, metavar="<PATH TO DIR>")
    generate_parser.add_argument("--out", type=Path, required=True, metavar="<PATH TO DIR>")
    generate_parser.add_argument("--rng-seed", type=int, default=0)
    generate_parser.add_argument(
        "--no-deterministic", action="store_true", help="Skip the deterministic stage."
    )
    generate_parser.add_argument("--havoc-stacking-max", type=_positive_int, default=16)
    generate_parser.add_argument("--mutation-rate", type=float, default=0.5)
    generate_parser.add_argument("--progress", action="store_true", help="Show a progress bar.")
    generate_parser.set_defaults(handler=cmd_generate)

    analyze_parser = subparsers.add_parser("analyze", help="Compute campaign metrics.")
    analyze_parser.add_argument(
        "--logs", type=Path, nargs="+", required=True, metavar="<PATH TO FILE>"
    )
    analyze_parser.add_argument("--sample", type=int, default=DEFAULT_SAMPLE_SIZE)
    analyze_parser.add_argument("--reps", type=_positive_int, default=DEFAULT_REPETITIONS)
    analyze_parser.add_argument("--bucket", type=_positive_int, default=DEFAULT_BUCKET_SECONDS)
    analyze_parser.add_argument("--rng-seed", type=int, default=0)
    analyze_parser.add_argument("--out-json", type=Path, metavar="<PATH TO FILE>")
    analyze_parser.add_argument("--out-csv", type=Path, metavar="<PATH TO FILE>")
    analyze_parser.add_argument("--out-tsv", type=Path, metavar="<PATH TO FILE>")
    analyze_parser.add_argument(
        "--mod-len", type=int, help="Re-validate every record against this modulus length."
    )
    analyze_parser.add_argument(
        "--min-ps-len", type=int, help="Re-validate every record with this minimum padding."
    )
    analyze_parser.add_argument("--progress", action="store_true", help="Show progress bars.")
    analyze_parser.set_defaults(handler=cmd_analyze)

    return parser


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise ValueError(f"expected a positive integer, got {number}")
    return number


def setup(argv: Optional[Sequence[str]] = None) -> Namespace:
    return build_parser().parse_args(argv)


def main(args: Namespace) -> int:
    """Dispatch a parsed command line and map failures to exit codes."""
    try:
        return args.handler(args)
    except (ConfigError, GeneratorConfigError, KeyFormatError, FileNotFoundError) as exc:
        LOGGER.error("%s", exc)
        return EXIT_USAGE
    except (
        CampaignError,
        ValidatorStartupError,
        InsufficientRecordsError,
        OSError,
        ValueError,
    ) as exc:
        LOGGER.error("%s", exc)
        return EXIT_RUNTIME


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = setup(argv)
    if args.verbose:
        level = logging.DEBUG
    elif args.command in ("run", "serve"):
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT)
    return main(args)
