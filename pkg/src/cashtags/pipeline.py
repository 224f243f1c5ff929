"""Pipeline configuration and staged execution.

Stages: fetch -> ingest -> aggregate -> backtest -> report. Running a stage
first brings its prerequisites up to date; each stage's outputs are cached
under a content hash of its inputs (file bytes plus the config subset that
feeds it), so an unchanged rerun reuses the artifacts byte-for-byte. fetch
is only run when requested explicitly since it needs a live archive
endpoint.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Callable, Iterable, Mapping

from . import corpus as corpus_mod
from .archive import ArchiveClientConfig, crawl_archive
from .backtest import (
    EvaluationReport,
    StrategyKind,
    StrategySpec,
    evaluate_strategy,
    report_from_dict,
    report_to_dict,
    sector_distribution,
    select_portfolio,
)
from .dates import DateRange
from .errors import CashtagsError, ConfigError, PipelineError
from .lexer import DEFAULT_KEYWORD_INFLECTIONS, KeywordTable, TickerLexicon, load_lexicon
from .market import WindowConfig, calendar_fill, compute_window_features, load_price_series
from .reports import (
    phase_overview_table,
    phase_signal_table,
    per_ticker_table,
    reactive_proactive_table,
    render_table,
    report_detail_table,
    strategy_overview_table,
    success_rate_table,
)
from .signals import (
    aggregate_daily,
    count_mentions,
    join_market,
    read_summaries_csv,
    write_summaries_csv,
)

log = logging.getLogger(__name__)

STAGES = ("fetch", "ingest", "aggregate", "backtest", "report", "all")

ENV_ENDPOINT = "CASHTAGS_ENDPOINT"
ENV_RATE_LIMIT = "CASHTAGS_RATE_LIMIT"

# (label, kind, x, mode) for the default strategy set; labels key the
# evaluations artifact and the table columns.
DEFAULT_STRATEGIES: tuple[tuple[str, StrategyKind, str | None, str | None], ...] = (
    ("all", StrategyKind.ALL_DAYS, None, None),
    ("mention", StrategyKind.MENTION_DAYS, None, None),
    ("buy_signal", StrategyKind.BUY_SIGNAL_DAYS, None, None),
    ("sell_signal", StrategyKind.SELL_SIGNAL_DAYS, None, None),
    ("equally_distributed", StrategyKind.EQUALLY_DISTRIBUTED, None, None),
    ("randomly_distributed", StrategyKind.RANDOMLY_DISTRIBUTED, None, None),
    ("reactive_buy_1d", StrategyKind.REACTIVE_BUY, "1d", None),
    ("reactive_buy_3d", StrategyKind.REACTIVE_BUY, "3d", None),
    ("reactive_buy_1w", StrategyKind.REACTIVE_BUY, "1w", None),
    ("proactive_buy_1d", StrategyKind.PROACTIVE_BUY, "1d", None),
    ("proactive_buy_3d", StrategyKind.PROACTIVE_BUY, "3d", None),
    ("proactive_buy_1w", StrategyKind.PROACTIVE_BUY, "1w", None),
    ("ma_filtered_any", StrategyKind.MA_FILTERED_BUY, None, "any-below-ma"),
    ("ma_filtered_all", StrategyKind.MA_FILTERED_BUY, None, "all-below-ma"),
)


@dataclass(frozen=True)
class StrategyProto:
    label: str
    kind: StrategyKind
    x: str | None = None
    mode: str | None = None
    trials: int = 5

    def spec(self, date_range: DateRange, seed: int) -> StrategySpec:
        return StrategySpec(
            kind=self.kind, date_range=date_range, x=self.x, mode=self.mode, seed=seed, trials=self.trials
        )


@dataclass(frozen=True)
class FetchConfig:
    endpoint: str
    subreddit: str
    page_size: int = 100
    rate_limit: float = 1.0
    max_attempts: int = 5
    score_filter: str = ">0"


@dataclass(frozen=True)
class PipelineConfig:
    corpus_files: tuple[Path, ...]
    ticker_table: Path
    etf_list: Path
    stopword_list: Path
    price_dir: Path
    output_dir: Path
    tickers: tuple[str, ...]
    date_range: DateRange
    reference_ticker: str | None = None
    text_stopwords: Path | None = None
    pre_hype_range: DateRange | None = None
    portfolio_k: int = 100
    portfolio_windows: tuple[DateRange, ...] = ()
    strategies: tuple[StrategyProto, ...] = ()
    seed: int = 0
    min_score: int = 1
    drop_deleted: bool = True
    windows: WindowConfig = field(default_factory=WindowConfig)
    tx_attribution: str = "all_mentioned"
    trading_days_only: bool = False
    mention_counting: str = "occurrence"
    keyword_inflections: Mapping[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_KEYWORD_INFLECTIONS)
    )
    fetch: FetchConfig | None = None

    def keyword_table(self) -> KeywordTable:
        return KeywordTable.from_inflections(self.keyword_inflections)

    def analysis_tickers(self) -> tuple[str, ...]:
        extra = (self.reference_ticker,) if self.reference_ticker else ()
        return tuple(dict.fromkeys(self.tickers + extra))

    # Artifact paths ----------------------------------------------------
    @property
    def raw_records_path(self) -> Path:
        return self.output_dir / "raw_records.jsonl"

    @property
    def corpus_path(self) -> Path:
        return self.output_dir / "corpus.jsonl"

    @property
    def corpus_stats_path(self) -> Path:
        return self.output_dir / "corpus_stats.json"

    @property
    def summaries_path(self) -> Path:
        return self.output_dir / "summaries.csv"

    @property
    def portfolio_path(self) -> Path:
        return self.output_dir / "portfolio.json"

    @property
    def evaluations_path(self) -> Path:
        return self.output_dir / "evaluations.json"

    @property
    def reports_dir(self) -> Path:
        return self.output_dir / "reports"


def _parse_range(value, problems: list[str], where: str) -> DateRange | None:
    if not isinstance(value, Mapping) or "start" not in value or "end" not in value:
        problems.append(f"{where}: expected an object with 'start' and 'end'")
        return None
    try:
        parsed = DateRange(date.fromisoformat(value["start"]), date.fromisoformat(value["end"]))
    except (TypeError, ValueError) as exc:
        problems.append(f"{where}: {exc}")
        return None
    return parsed


def _parse_strategies(raw, problems: list[str]) -> tuple[StrategyProto, ...]:
    protos: list[StrategyProto] = []
    for position, item in enumerate(raw):
        where = f"strategies[{position}]"
        if not isinstance(item, Mapping) or "kind" not in item:
            problems.append(f"{where}: expected an object with 'kind'")
            continue
        try:
            kind = StrategyKind(item["kind"])
        except ValueError:
            problems.append(f"{where}: unknown kind {item['kind']!r}")
            continue
        x = item.get("x")
        mode = item.get("mode")
        suffix = f"_{x}" if x else ("_" + mode.split("-")[0] if mode else "")
        label = item.get("label") or f"{kind.value}{suffix}"
        try:
            proto = StrategyProto(label=label, kind=kind, x=x, mode=mode, trials=int(item.get("trials", 5)))
            proto.spec(DateRange(date(2000, 1, 1), date(2000, 1, 2)), 0)  # validates x/mode/trials
        except ValueError as exc:
            problems.append(f"{where}: {exc}")
            continue
        protos.append(proto)
    return tuple(protos)


def load_config(
    path: Path,
    *,
    range_override: DateRange | None = None,
    seed_override: int | None = None,
    out_override: Path | None = None,
) -> PipelineConfig:
    """Parse and validate the single JSON configuration document.

    Collects every field problem and raises one :class:`ConfigError` listing
    them all. Path fields are resolved relative to the config file.
    """
    path = Path(path)
    problems: list[str] = []
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    if not isinstance(raw, Mapping):
        raise ConfigError([f"{path}: top level must be a JSON object"])
    base = path.parent

    def resolve(p) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base / candidate

    corpus_files = raw.get("corpus_files")
    if not isinstance(corpus_files, list) or not corpus_files:
        problems.append("corpus_files: expected a non-empty list of JSONL paths")
        corpus_files = []
    corpus_paths = tuple(resolve(p) for p in corpus_files)

    lexicon_cfg = raw.get("lexicon")
    if not isinstance(lexicon_cfg, Mapping):
        problems.append("lexicon: expected an object with ticker_table/etf_list/stopword_list")
        lexicon_cfg = {}
    ticker_table = lexicon_cfg.get("ticker_table")
    etf_list = lexicon_cfg.get("etf_list")
    stopword_list = lexicon_cfg.get("stopword_list")
    for name, value in (
        ("lexicon.ticker_table", ticker_table),
        ("lexicon.etf_list", etf_list),
        ("lexicon.stopword_list", stopword_list),
    ):
        if not value:
            problems.append(f"{name}: required path missing")

    price_dir = raw.get("price_dir")
    if not price_dir:
        problems.append("price_dir: required path missing")
    output_dir = raw.get("output_dir")
    if not output_dir:
        problems.append("output_dir: required path missing")

    tickers = raw.get("tickers")
    if not isinstance(tickers, list) or not tickers:
        problems.append("tickers: expected a non-empty list of symbols")
        tickers = []
    tickers = tuple(str(t).upper() for t in tickers)

    date_range = None
    if "date_range" not in raw:
        problems.append("date_range: required")
    else:
        date_range = _parse_range(raw["date_range"], problems, "date_range")
    pre_hype = None
    if raw.get("pre_hype_range") is not None:
        pre_hype = _parse_range(raw["pre_hype_range"], problems, "pre_hype_range")

    portfolio_cfg = raw.get("portfolio") or {}
    portfolio_k = portfolio_cfg.get("k", 100)
    if not isinstance(portfolio_k, int) or portfolio_k < 1:
        problems.append("portfolio.k: expected a positive integer")
        portfolio_k = 100
    portfolio_windows: list[DateRange] = []
    for position, window in enumerate(portfolio_cfg.get("windows", [])):
        parsed = _parse_range(window, problems, f"portfolio.windows[{position}]")
        if parsed is not None:
            portfolio_windows.append(parsed)

    protos = tuple(StrategyProto(label=l, kind=k, x=x, mode=m) for l, k, x, m in DEFAULT_STRATEGIES)
    if raw.get("strategies") is not None:
        if not isinstance(raw["strategies"], list):
            problems.append("strategies: expected a list")
        else:
            protos = _parse_strategies(raw["strategies"], problems)
            if not protos:
                problems.append("strategies: no valid entries")

    windows_cfg = raw.get("windows") or {}
    try:
        windows = WindowConfig(
            week_days=int(windows_cfg.get("week_days", 7)),
            month_days=int(windows_cfg.get("month_days", 30)),
            quarter_days=int(windows_cfg.get("quarter_days", 90)),
            ma_days=int(windows_cfg.get("ma_days", 30)),
        )
    except (TypeError, ValueError):
        problems.append("windows: day counts must be integers")
        windows = WindowConfig()

    toggles = raw.get("toggles") or {}
    tx_attribution = toggles.get("attribution", "all_mentioned")
    if tx_attribution not in ("all_mentioned", "sole_mention"):
        problems.append(f"toggles.attribution: unknown mode {tx_attribution!r}")
        tx_attribution = "all_mentioned"
    mention_counting = toggles.get("mention_counting", "occurrence")
    if mention_counting not in ("occurrence", "submission"):
        problems.append(f"toggles.mention_counting: unknown mode {mention_counting!r}")
        mention_counting = "occurrence"
    trading_days_only = bool(toggles.get("trading_days_only", False))

    keyword_inflections = dict(DEFAULT_KEYWORD_INFLECTIONS)
    if raw.get("keywords") is not None:
        if not isinstance(raw["keywords"], Mapping):
            problems.append("keywords: expected an object mapping group -> word list")
        else:
            for group, words in raw["keywords"].items():
                if group not in keyword_inflections:
                    problems.append(f"keywords.{group}: unknown transaction group")
                elif not isinstance(words, list) or not words:
                    problems.append(f"keywords.{group}: expected a non-empty word list")
                else:
                    keyword_inflections[group] = tuple(str(w) for w in words)

    fetch_cfg = None
    if raw.get("fetch") is not None:
        fetch_raw = raw["fetch"]
        if not isinstance(fetch_raw, Mapping) or not fetch_raw.get("endpoint") or not fetch_raw.get("subreddit"):
            problems.append("fetch: expected an object with endpoint and subreddit")
        else:
            try:
                fetch_cfg = FetchConfig(
                    endpoint=str(fetch_raw["endpoint"]),
                    subreddit=str(fetch_raw["subreddit"]),
                    page_size=int(fetch_raw.get("page_size", 100)),
                    rate_limit=float(fetch_raw.get("rate_limit", 1.0)),
                    max_attempts=int(fetch_raw.get("max_attempts", 5)),
                    score_filter=str(fetch_raw.get("score_filter", ">0")),
                )
            except (TypeError, ValueError) as exc:
                problems.append(f"fetch: {exc}")

    reference = raw.get("reference_ticker")
    reference = str(reference).upper() if reference else None
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        problems.append("seed: expected an integer")
        seed = 0
    min_score = raw.get("min_score", 1)
    if not isinstance(min_score, int):
        problems.append("min_score: expected an integer")
        min_score = 1

    if problems:
        raise ConfigError(problems)

    config = PipelineConfig(
        corpus_files=corpus_paths,
        ticker_table=resolve(ticker_table),
        etf_list=resolve(etf_list),
        stopword_list=resolve(stopword_list),
        price_dir=resolve(price_dir),
        output_dir=resolve(output_dir),
        tickers=tickers,
        date_range=date_range,
        reference_ticker=reference,
        text_stopwords=resolve(raw["text_stopwords"]) if raw.get("text_stopwords") else None,
        pre_hype_range=pre_hype,
        portfolio_k=portfolio_k,
        portfolio_windows=tuple(portfolio_windows) or ((date_range,) if date_range else ()),
        strategies=protos,
        seed=seed,
        min_score=min_score,
        drop_deleted=bool(raw.get("drop_deleted", True)),
        windows=windows,
        tx_attribution=tx_attribution,
        trading_days_only=trading_days_only,
        mention_counting=mention_counting,
        keyword_inflections=keyword_inflections,
        fetch=fetch_cfg,
    )
    if range_override is not None:
        config = replace(config, date_range=range_override)
    if seed_override is not None:
        config = replace(config, seed=seed_override)
    if out_override is not None:
        config = replace(config, output_dir=Path(out_override))
    return config


# --- caching -------------------------------------------------------------


def _digest_files(hasher: "hashlib._Hash", paths: Iterable[Path]) -> None:
    for p in sorted(Path(p) for p in paths):
        hasher.update(str(p.name).encode())
        try:
            hasher.update(p.read_bytes())
        except OSError:
            hasher.update(b"<missing>")


def _digest_config(hasher: "hashlib._Hash", payload) -> None:
    hasher.update(json.dumps(payload, sort_keys=True, default=str).encode())


class _Cache:
    def __init__(self, path: Path) -> None:
        self.path = path
        try:
            self.entries = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            self.entries = {}

    def fresh(self, stage: str, key: str, outputs: Iterable[Path]) -> bool:
        entry = self.entries.get(stage)
        return bool(entry) and entry.get("key") == key and all(Path(p).exists() for p in outputs)

    def record(self, stage: str, key: str, outputs: Iterable[Path]) -> None:
        self.entries[stage] = {"key": key, "outputs": [str(p) for p in outputs]}
        self.path.write_text(json.dumps(self.entries, indent=2, sort_keys=True), encoding="utf-8")


def _ingest_key(config: PipelineConfig) -> str:
    hasher = hashlib.sha256()
    _digest_files(hasher, config.corpus_files)
    if config.text_stopwords:
        _digest_files(hasher, [config.text_stopwords])
    _digest_config(
        hasher,
        {
            "min_score": config.min_score,
            "drop_deleted": config.drop_deleted,
            "range": [config.date_range.start, config.date_range.end],
        },
    )
    return hasher.hexdigest()


def _aggregate_key(config: PipelineConfig) -> str:
    hasher = hashlib.sha256()
    _digest_files(hasher, [config.corpus_path])
    _digest_files(hasher, [config.ticker_table, config.etf_list, config.stopword_list])
    price_files = [config.price_dir / f"{t}.csv" for t in config.analysis_tickers()]
    _digest_files(hasher, price_files)
    _digest_config(
        hasher,
        {
            "tickers": config.analysis_tickers(),
            "windows": [
                config.windows.week_days,
                config.windows.month_days,
                config.windows.quarter_days,
                config.windows.ma_days,
            ],
            "attribution": config.tx_attribution,
            "mention_counting": config.mention_counting,
            "keywords": {k: list(v) for k, v in sorted(config.keyword_inflections.items())},
            "portfolio_k": config.portfolio_k,
            "portfolio_windows": [[w.start, w.end] for w in config.portfolio_windows],
        },
    )
    return hasher.hexdigest()


def _backtest_key(config: PipelineConfig) -> str:
    hasher = hashlib.sha256()
    _digest_files(hasher, [config.summaries_path])
    _digest_config(
        hasher,
        {
            "strategies": [(p.label, p.kind.value, p.x, p.mode, p.trials) for p in config.strategies],
            "seed": config.seed,
            "range": [config.date_range.start, config.date_range.end],
            "pre_hype": None
            if config.pre_hype_range is None
            else [config.pre_hype_range.start, config.pre_hype_range.end],
            "trading_days_only": config.trading_days_only,
            "reference": config.reference_ticker,
        },
    )
    return hasher.hexdigest()


def _report_key(config: PipelineConfig) -> str:
    hasher = hashlib.sha256()
    _digest_files(hasher, [config.evaluations_path])
    return hasher.hexdigest()


# --- stages ----------------------------------------------------------------


def _run_fetch(config: PipelineConfig) -> list[Path]:
    if config.fetch is None:
        raise PipelineError("fetch stage requires a 'fetch' section in the configuration")
    endpoint = os.environ.get(ENV_ENDPOINT, config.fetch.endpoint)
    rate_limit = float(os.environ.get(ENV_RATE_LIMIT, config.fetch.rate_limit))
    client = ArchiveClientConfig(
        endpoint=endpoint,
        subreddit=config.fetch.subreddit,
        page_size=config.fetch.page_size,
        rate_limit=rate_limit,
        max_attempts=config.fetch.max_attempts,
        score_filter=config.fetch.score_filter,
    )
    start_ts = int(datetime.combine(config.date_range.start, datetime.min.time(), tzinfo=timezone.utc).timestamp())
    end_ts = int(
        datetime.combine(
            config.date_range.end + timedelta(days=1), datetime.min.time(), tzinfo=timezone.utc
        ).timestamp()
    )
    count = 0
    with config.raw_records_path.open("w", encoding="utf-8") as handle:
        for record in crawl_archive(client, start_ts, end_ts):
            handle.write(json.dumps(record, sort_keys=True))
            handle.write("\n")
            count += 1
    log.info("fetch: wrote %d raw records to %s", count, config.raw_records_path)
    return [config.raw_records_path]


def _run_ingest(config: PipelineConfig) -> list[Path]:
    skipped = 0

    def count_skip(_exc) -> None:
        nonlocal skipped
        skipped += 1

    records = []
    for path in config.corpus_files:
        if not path.exists():
            raise PipelineError(f"ingest: corpus file not found: {path}")
        records.extend(
            corpus_mod.iter_submission_records(path, skip_invalid=True, on_skip=count_skip)
        )
    filtered = corpus_mod.filter_corpus(
        records, min_score=config.min_score, drop_deleted=config.drop_deleted, date_range=config.date_range
    )
    if skipped:
        log.warning("ingest: skipped %d invalid record(s)", skipped)
    corpus_mod.write_corpus_jsonl(filtered, config.corpus_path)

    stopwords = (
        corpus_mod.load_stopwords(config.text_stopwords) if config.text_stopwords else frozenset()
    )
    titles, bodies = corpus_mod.corpus_stats(filtered, stopwords)
    profile = corpus_mod.engagement_profile(filtered)
    stats_payload = {
        "submissions": len(filtered),
        "skipped_records": skipped,
        "titles": titles.__dict__,
        "bodies": bodies.__dict__,
        "flair_ratios": profile.flair_ratios,
        "tagged_count": profile.tagged_count,
        "untagged_count": profile.untagged_count,
        "hourly_weekday": list(profile.weekday_hours),
        "hourly_weekend": list(profile.weekend_hours),
    }
    config.corpus_stats_path.write_text(
        json.dumps(stats_payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    log.info("ingest: %d submissions kept", len(filtered))
    return [config.corpus_path, config.corpus_stats_path]


def _load_featured_series(config: PipelineConfig, ticker: str):
    price_path = config.price_dir / f"{ticker}.csv"
    if not price_path.exists():
        raise PipelineError(f"aggregate: missing price file for ticker {ticker}: {price_path}")
    bars = load_price_series(price_path, ticker)
    if not bars:
        raise PipelineError(f"aggregate: price file for ticker {ticker} has no rows")
    warmup = config.windows.ma_days + config.windows.week_days
    fill_start = max(bars[0].date, config.date_range.start - timedelta(days=warmup))
    fill_start = min(fill_start, config.date_range.start)
    horizon = config.date_range.end + timedelta(days=config.windows.quarter_days)
    fill_end = min(max(bars[-1].date, config.date_range.end), horizon)
    series = calendar_fill(bars, DateRange(fill_start, fill_end), ticker=ticker)
    return compute_window_features(series, config.windows)


def _run_aggregate(config: PipelineConfig) -> list[Path]:
    if not config.corpus_path.exists():
        raise PipelineError("aggregate: corpus.jsonl missing; run the ingest stage first")
    filtered = corpus_mod.read_corpus_jsonl(config.corpus_path, config.date_range)
    lexicon = load_lexicon(config.ticker_table, config.etf_list, config.stopword_list)
    table = config.keyword_table()

    daily = aggregate_daily(
        filtered,
        lexicon,
        config.analysis_tickers(),
        keyword_table=table,
        mention_counting=config.mention_counting,
        tx_attribution=config.tx_attribution,
    )
    # Portfolio ranking sees every detected symbol, not just tracked ones.
    mention_totals = count_mentions(filtered, lexicon, mention_counting=config.mention_counting)

    series = {t: _load_featured_series(config, t) for t in config.analysis_tickers()}
    summaries = join_market(daily, series)
    write_summaries_csv(summaries, config.summaries_path)

    rankings, intersection = select_portfolio(mention_totals, config.portfolio_windows, config.portfolio_k)
    portfolio_payload = {
        "k": config.portfolio_k,
        "windows": [
            {
                "start": window.start.isoformat(),
                "end": window.end.isoformat(),
                "top": [{"symbol": s, "mentions": c} for s, c in ranked],
                "sectors": sector_distribution([s for s, _ in ranked], lexicon),
            }
            for window, ranked in zip(config.portfolio_windows, rankings)
        ],
        "intersection": intersection,
        "intersection_sectors": sector_distribution(intersection, lexicon),
    }
    config.portfolio_path.write_text(
        json.dumps(portfolio_payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    log.info("aggregate: %d summaries for %d tickers", len(summaries), len(config.analysis_tickers()))
    return [config.summaries_path, config.portfolio_path]


def _run_backtest(config: PipelineConfig) -> list[Path]:
    if not config.summaries_path.exists():
        raise PipelineError("backtest: summaries.csv missing; run the aggregate stage first")
    grouped = read_summaries_csv(config.summaries_path)
    reference = config.reference_ticker
    portfolio = {t: s for t, s in grouped.items() if t != reference}
    ranges: dict[str, DateRange] = {"full": config.date_range}
    if config.pre_hype_range is not None:
        ranges["pre_hype"] = config.pre_hype_range

    evaluations: dict[str, dict[str, dict]] = {}
    for range_label, window in ranges.items():
        per_strategy: dict[str, dict] = {}
        for proto in config.strategies:
            spec = proto.spec(window, config.seed)
            report = evaluate_strategy(portfolio, spec, trading_days_only=config.trading_days_only)
            per_strategy[proto.label] = report_to_dict(report)
        if reference and reference in grouped:
            spec = StrategySpec(kind=StrategyKind.ALL_DAYS, date_range=window)
            report = evaluate_strategy({reference: grouped[reference]}, spec)
            per_strategy["reference_all"] = report_to_dict(report)
        evaluations[range_label] = per_strategy

    payload = {
        "ranges": {
            label: {"start": window.start.isoformat(), "end": window.end.isoformat()}
            for label, window in ranges.items()
        },
        "evaluations": evaluations,
    }
    config.evaluations_path.write_text(
        json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    log.info("backtest: evaluated %d strategies over %d range(s)", len(config.strategies), len(ranges))
    return [config.evaluations_path]


def _overview_columns(reports: Mapping[str, EvaluationReport]) -> list[str]:
    preferred = ["reference_all", "all", "mention", "buy_signal", "sell_signal"]
    return [label for label in preferred if label in reports]


def _run_report(config: PipelineConfig) -> list[Path]:
    if not config.evaluations_path.exists():
        raise PipelineError("report: evaluations.json missing; run the backtest stage first")
    payload = json.loads(config.evaluations_path.read_text(encoding="utf-8"))
    evaluations = {
        range_label: {label: report_from_dict(data) for label, data in strategies.items()}
        for range_label, strategies in payload["evaluations"].items()
    }
    full = evaluations.get("full", {})
    pre_hype = evaluations.get("pre_hype")

    tables: dict[str, tuple[list[str], list[list[str]]]] = {}
    overview_columns = _overview_columns(full)
    if overview_columns:
        tables["table4_strategy_overview"] = strategy_overview_table(full, overview_columns)
    if all(label in full for label in ("buy_signal", "equally_distributed", "randomly_distributed", "all")):
        tables["table5_success_rates"] = success_rate_table(full)
    if "all" in full and "buy_signal" in full:
        tables["table7_per_ticker"] = per_ticker_table(full["all"], full["buy_signal"])
    reactive_labels = ["all", "buy_signal"] + [f"reactive_buy_{x}" for x in ("1d", "3d", "1w")]
    reactive_labels += [f"proactive_buy_{x}" for x in ("1d", "3d", "1w")]
    if all(label in full for label in reactive_labels):
        tables["table8_reactive_proactive"] = reactive_proactive_table(full)
    if pre_hype is not None:
        if all("all" in e and "buy_signal" in e for e in (full, pre_hype)):
            tables["table9_phase_overview"] = phase_overview_table(full, pre_hype)
        phase_labels = ["buy_signal", "reactive_buy_1d", "reactive_buy_1w", "proactive_buy_1d", "proactive_buy_1w"]
        if all(label in full and label in pre_hype for label in phase_labels):
            tables["table10_phase_signals"] = phase_signal_table(full, pre_hype)

    # Render everything in memory first: an error must not leave partial files.
    rendered: list[tuple[Path, str]] = []
    reports_dir = config.reports_dir
    for name, table in tables.items():
        for fmt, suffix in (("csv", "csv"), ("text", "txt")):
            rendered.append((reports_dir / f"{name}.{suffix}", render_table(table, fmt)))
    for range_label, strategies in evaluations.items():
        for label, report in strategies.items():
            detail = report_detail_table(report)
            for fmt, suffix in (("csv", "csv"), ("text", "txt")):
                rendered.append(
                    (reports_dir / f"detail_{range_label}_{label}.{suffix}", render_table(detail, fmt))
                )

    reports_dir.mkdir(parents=True, exist_ok=True)
    for out_path, text in rendered:
        out_path.write_text(text, encoding="utf-8")
    log.info("report: wrote %d files to %s", len(rendered), reports_dir)
    return [p for p, _ in rendered]


_STAGE_CHAIN = ("ingest", "aggregate", "backtest", "report")

_STAGE_RUNNERS: dict[str, Callable[[PipelineConfig], list[Path]]] = {
    "ingest": _run_ingest,
    "aggregate": _run_aggregate,
    "backtest": _run_backtest,
    "report": _run_report,
}

_STAGE_KEYS: dict[str, Callable[[PipelineConfig], str]] = {
    "ingest": _ingest_key,
    "aggregate": _aggregate_key,
    "backtest": _backtest_key,
    "report": _report_key,
}

_STAGE_OUTPUTS: dict[str, Callable[[PipelineConfig], list[Path]]] = {
    "ingest": lambda c: [c.corpus_path, c.corpus_stats_path],
    "aggregate": lambda c: [c.summaries_path, c.portfolio_path],
    "backtest": lambda c: [c.evaluations_path],
    "report": lambda c: [c.reports_dir],
}


def run_pipeline(config: PipelineConfig, stage: str) -> int:
    """Run ``stage`` (and any stale prerequisites) and return 0 on success.

    ``all`` covers ingest through report. ``fetch`` always executes (it
    depends on a remote archive, not on local inputs).
    """
    if stage not in STAGES:
        raise PipelineError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    if stage == "fetch":
        _run_fetch(config)
        return 0

    chain = _STAGE_CHAIN if stage == "all" else _STAGE_CHAIN[: _STAGE_CHAIN.index(stage) + 1]
    cache = _Cache(config.output_dir / "cache_manifest.json")
    for name in chain:
        key = _STAGE_KEYS[name](config)
        outputs = _STAGE_OUTPUTS[name](config)
        if cache.fresh(name, key, outputs):
            log.info("%s: up to date (cached)", name)
            continue
        produced = _STAGE_RUNNERS[name](config)
        cache.record(name, key, produced or outputs)
    return 0
