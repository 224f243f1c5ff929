"""Command-line entry point.

Usage: ``cashtags <stage> --config pipeline.json [--range A..B] [--seed N]
[--out DIR]`` where stage is one of fetch, ingest, aggregate, backtest,
report, all. Exit codes: 0 success, 1 stage failure, 2 invalid
configuration or arguments.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .dates import DateRange
from .errors import CashtagsError, ConfigError
from .pipeline import ENV_ENDPOINT, ENV_RATE_LIMIT, STAGES, load_config, run_pipeline

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cashtags",
        description="Mine ticker mentions and buy/sell signals from archived submissions "
        "and backtest them against baseline strategies.",
        epilog=f"Environment overrides for the fetch stage: {ENV_ENDPOINT}, {ENV_RATE_LIMIT}.",
    )
    subparsers = parser.add_subparsers(dest="stage", metavar="stage")
    help_by_stage = {
        "fetch": "crawl the archive API into raw_records.jsonl",
        "ingest": "parse and filter corpus files; write corpus.jsonl and statistics",
        "aggregate": "detect tickers, aggregate per day and join market data",
        "backtest": "evaluate the configured strategies",
        "report": "render evaluation tables (CSV and text)",
        "all": "run ingest through report",
    }
    for stage in STAGES:
        sub = subparsers.add_parser(stage, help=help_by_stage[stage])
        sub.add_argument("--config", required=True, type=Path, help="pipeline configuration JSON")
        sub.add_argument("--range", help="override the date range, START..END (ISO dates)")
        sub.add_argument("--seed", type=int, help="override the random seed")
        sub.add_argument("--out", type=Path, help="override the output directory")
        sub.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.stage is None:
        parser.print_help()
        return 2
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        range_override = DateRange.parse(args.range) if args.range else None
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        config = load_config(
            args.config,
            range_override=range_override,
            seed_override=args.seed,
            out_override=args.out,
        )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run_pipeline(config, args.stage)
    except CashtagsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
