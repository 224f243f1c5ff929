"""Per-(ticker, day) aggregation, buy/sell signals and market join."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus
from .errors import CashtagsError, CoverageError
from .lexer import KeywordTable, TickerLexicon, TransactionCounts, scan_text
from .market import AFTER_LABELS, BEFORE_LABELS, PriceSeries


class Signal(Enum):
    BUY = "buy"
    SELL = "sell"
    NONE = "none"


class SignalClass(Enum):
    REACTIVE = "reactive"
    PROACTIVE = "proactive"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class DailyActivity:
    mention_count: int = 0
    tx: TransactionCounts = TransactionCounts()

    def merged(self, mentions: int, tx: TransactionCounts) -> "DailyActivity":
        return DailyActivity(self.mention_count + mentions, self.tx + tx)


@dataclass(frozen=True)
class DailySummary:
    """One (ticker, calendar day): forum activity joined with market data."""

    ticker: str
    date: date
    mention_count: int
    tx: TransactionCounts
    signal: Signal
    close: float
    volume: int
    volatility: float
    is_trading_day: bool
    change_before: Mapping[str, float | None]
    change_after: Mapping[str, float | None]
    ma_of_change: Mapping[str, float | None]


@dataclass(frozen=True)
class FlagSet:
    """Boolean features for one (summary, x, y) pair; None when the needed
    change window is undefined."""

    price_up_before: bool | None
    price_up_after: bool | None
    dip: bool | None
    buy_after_decline: bool | None
    buy_accuracy: bool | None
    sell_accuracy: bool | None


def derive_daily_signal(tx: TransactionCounts) -> Signal:
    """Buy iff buy-words outnumber sell-words, Sell for the reverse, None on
    ties (including zero activity)."""
    if tx.buy > tx.sell:
        return Signal.BUY
    if tx.sell > tx.buy:
        return Signal.SELL
    return Signal.NONE


def _submission_text(submission) -> str:
    body = submission.body
    return submission.title if body is None else f"{submission.title}\n{body}"


def aggregate_daily(
    corpus: Corpus,
    lexicon: TickerLexicon,
    tickers: Iterable[str],
    *,
    keyword_table: KeywordTable | None = None,
    mention_counting: str = "occurrence",
    tx_attribution: str = "all_mentioned",
) -> dict[tuple[str, date], DailyActivity]:
    """Tally mentions and transaction words per (ticker, UTC day).

    A submission's transaction counts are attributed once to every tracked
    ticker it mentions ("all_mentioned"), or only when a single tracked
    ticker appears ("sole_mention"). ``mention_counting`` is "occurrence"
    (each mention counts) or "submission" (at most one per post). Every
    (ticker, day in the corpus range) is materialized, zero-filled when
    silent.
    """
    if mention_counting not in ("occurrence", "submission"):
        raise ValueError(f"unknown mention_counting mode {mention_counting!r}")
    if tx_attribution not in ("all_mentioned", "sole_mention"):
        raise ValueError(f"unknown tx_attribution mode {tx_attribution!r}")
    tracked = frozenset(tickers)
    daily: dict[tuple[str, date], DailyActivity] = {
        (ticker, day): DailyActivity() for ticker in tracked for day in corpus.range.iter_days()
    }
    no_tx = TransactionCounts()
    for submission in corpus:
        mentions, tx = scan_text(_submission_text(submission), lexicon, keyword_table)
        if not mentions:
            continue
        per_symbol: dict[str, int] = {}
        for mention in mentions:
            if mention.symbol in tracked:
                per_symbol[mention.symbol] = per_symbol.get(mention.symbol, 0) + 1
        if not per_symbol:
            continue
        attribute_tx = tx_attribution == "all_mentioned" or len(per_symbol) == 1
        day = submission.created_date
        for symbol, occurrences in per_symbol.items():
            count = occurrences if mention_counting == "occurrence" else 1
            key = (symbol, day)
            daily[key] = daily[key].merged(count, tx if attribute_tx else no_tx)
    return daily


def count_mentions(
    corpus: Corpus,
    lexicon: TickerLexicon,
    *,
    mention_counting: str = "occurrence",
) -> dict[tuple[str, date], int]:
    """Mention tally per (symbol, UTC day) over every detected symbol,
    tracked or not; feeds the portfolio ranking."""
    if mention_counting not in ("occurrence", "submission"):
        raise ValueError(f"unknown mention_counting mode {mention_counting!r}")
    totals: dict[tuple[str, date], int] = {}
    for submission in corpus:
        mentions, _ = scan_text(_submission_text(submission), lexicon)
        if not mentions:
            continue
        day = submission.created_date
        per_symbol: dict[str, int] = {}
        for mention in mentions:
            per_symbol[mention.symbol] = per_symbol.get(mention.symbol, 0) + 1
        for symbol, occurrences in per_symbol.items():
            count = occurrences if mention_counting == "occurrence" else 1
            key = (symbol, day)
            totals[key] = totals.get(key, 0) + count
    return totals


def join_market(
    daily: Mapping[tuple[str, date], DailyActivity],
    series: Mapping[str, PriceSeries],
) -> list[DailySummary]:
    """One DailySummary per aggregated key, sorted by (ticker, date).

    Every key's date must be covered by that ticker's feature-bearing series;
    otherwise a :class:`CoverageError` lists what is missing.
    """
    missing: list[tuple[str, date]] = []
    summaries: list[DailySummary] = []
    for (ticker, day), activity in sorted(daily.items()):
        ticker_series = series.get(ticker)
        if ticker_series is not None and ticker_series.change_before is None:
            raise ValueError(f"series for {ticker} lacks window features; run compute_window_features")
        index = ticker_series.index_of(day) if ticker_series is not None else None
        if ticker_series is None or index is None:
            missing.append((ticker, day))
            continue
        bar = ticker_series.bars[index]
        summaries.append(
            DailySummary(
                ticker=ticker,
                date=day,
                mention_count=activity.mention_count,
                tx=activity.tx,
                signal=derive_daily_signal(activity.tx),
                close=bar.close,
                volume=bar.volume,
                volatility=ticker_series.rel_volatility[index],
                is_trading_day=bar.is_trading_day,
                change_before={label: ticker_series.change_before[label][index] for label in BEFORE_LABELS},
                change_after={label: ticker_series.change_after[label][index] for label in AFTER_LABELS},
                ma_of_change={label: ticker_series.ma_of_change[label][index] for label in BEFORE_LABELS},
            )
        )
    if missing:
        preview = ", ".join(f"{t}@{d}" for t, d in missing[:5])
        raise CoverageError(
            f"market data missing for {len(missing)} (ticker, day) pair(s): {preview}",
            missing_dates=[d for _, d in missing],
        )
    return summaries


def derive_flags(summary: DailySummary, x: str, y: str) -> FlagSet:
    """Boolean features over backward window ``x`` and forward window ``y``."""
    before_x = summary.change_before[x]
    after_x = summary.change_after[x]
    after_y = summary.change_after[y]
    is_buy = summary.signal is Signal.BUY
    is_sell = summary.signal is Signal.SELL
    return FlagSet(
        price_up_before=None if before_x is None else before_x > 0,
        price_up_after=None if after_y is None else after_y > 0,
        dip=None if before_x is None or after_x is None else before_x < 0 < after_x,
        buy_after_decline=None if before_x is None else is_buy and before_x < 0,
        buy_accuracy=None if after_y is None else is_buy and after_y > 0,
        sell_accuracy=None if after_y is None else is_sell and after_y < 0,
    )


def classify_buy_signal(summary: DailySummary, x: str) -> SignalClass:
    """Reactive when the backward x-change beats the forward one, proactive
    for the reverse, neutral on exact ties. Only valid for Buy days with both
    changes defined."""
    if summary.signal is not Signal.BUY:
        raise ValueError(f"classify_buy_signal needs a Buy day, got {summary.signal.value}")
    before = summary.change_before[x]
    after = summary.change_after[x]
    if before is None or after is None:
        raise ValueError(f"change windows for x={x} undefined on {summary.ticker}@{summary.date}")
    if before > after:
        return SignalClass.REACTIVE
    if before < after:
        return SignalClass.PROACTIVE
    return SignalClass.NEUTRAL


# --- CSV export -------------------------------------------------------------

_FLAG_COLUMNS = (
    [f"price_up_before_{x}" for x in BEFORE_LABELS]
    + [f"price_up_after_{y}" for y in AFTER_LABELS]
    + [f"dip_{x}" for x in BEFORE_LABELS]
    + [f"buy_after_decline_{x}" for x in BEFORE_LABELS]
    + [f"buy_accuracy_{y}" for y in AFTER_LABELS]
    + [f"sell_accuracy_{y}" for y in AFTER_LABELS]
)

SUMMARY_COLUMNS = (
    ["ticker", "date", "mentions", "buy", "hold", "sell", "call", "put", "signal"]
    + ["close", "volume", "volatility", "is_trading_day"]
    + [f"change_before_{x}" for x in BEFORE_LABELS]
    + [f"change_after_{y}" for y in AFTER_LABELS]
    + [f"ma30_{x}" for x in BEFORE_LABELS]
    + _FLAG_COLUMNS
)


def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest exact round-trip
    return str(value)


def summary_row(summary: DailySummary) -> list[str]:
    flags: list[bool | None] = []
    flags += [derive_flags(summary, x, "1d").price_up_before for x in BEFORE_LABELS]
    flags += [derive_flags(summary, "1d", y).price_up_after for y in AFTER_LABELS]
    flags += [derive_flags(summary, x, "1d").dip for x in BEFORE_LABELS]
    flags += [derive_flags(summary, x, "1d").buy_after_decline for x in BEFORE_LABELS]
    flags += [derive_flags(summary, "1d", y).buy_accuracy for y in AFTER_LABELS]
    flags += [derive_flags(summary, "1d", y).sell_accuracy for y in AFTER_LABELS]
    row = [
        summary.ticker,
        summary.date.isoformat(),
        str(summary.mention_count),
        str(summary.tx.buy),
        str(summary.tx.hold),
        str(summary.tx.sell),
        str(summary.tx.call),
        str(summary.tx.put),
        summary.signal.value,
        repr(summary.close),
        str(summary.volume),
        repr(summary.volatility),
        "true" if summary.is_trading_day else "false",
    ]
    row += [_cell(summary.change_before[x]) for x in BEFORE_LABELS]
    row += [_cell(summary.change_after[y]) for y in AFTER_LABELS]
    row += [_cell(summary.ma_of_change[x]) for x in BEFORE_LABELS]
    row += [_cell(flag) for flag in flags]
    return row


def write_summaries_csv(summaries: Sequence[DailySummary], path: Path) -> None:
    """Deterministic export, one row per (ticker, date) in SUMMARY_COLUMNS order.

    Floats use shortest-round-trip formatting so a read-back reproduces the
    exact values.
    """
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for summary in summaries:
            writer.writerow(summary_row(summary))


def _parse_optional_float(cell: str) -> float | None:
    return None if cell == "NA" else float(cell)


def read_summaries_csv(path: Path) -> dict[str, list[DailySummary]]:
    """Read back an export of :func:`write_summaries_csv`, grouped by ticker."""
    grouped: dict[str, list[DailySummary]] = {}
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != SUMMARY_COLUMNS:
            raise CashtagsError(f"{path}: unexpected summaries header")
        for row in reader:
            record = dict(zip(SUMMARY_COLUMNS, row))
            tx = TransactionCounts(
                buy=int(record["buy"]),
                hold=int(record["hold"]),
                sell=int(record["sell"]),
                call=int(record["call"]),
                put=int(record["put"]),
            )
            summary = DailySummary(
                ticker=record["ticker"],
                date=date.fromisoformat(record["date"]),
                mention_count=int(record["mentions"]),
                tx=tx,
                signal=Signal(record["signal"]),
                close=float(record["close"]),
                volume=int(record["volume"]),
                volatility=float(record["volatility"]),
                is_trading_day=record["is_trading_day"] == "true",
                change_before={x: _parse_optional_float(record[f"change_before_{x}"]) for x in BEFORE_LABELS},
                change_after={y: _parse_optional_float(record[f"change_after_{y}"]) for y in AFTER_LABELS},
                ma_of_change={x: _parse_optional_float(record[f"ma30_{x}"]) for x in BEFORE_LABELS},
            )
            grouped.setdefault(summary.ticker, []).append(summary)
    for rows in grouped.values():
        rows.sort(key=lambda s: s.date)
    return grouped
