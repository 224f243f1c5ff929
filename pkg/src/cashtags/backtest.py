"""Strategy evaluation over daily summaries.

Selection strategies cover the signal-following variants, three comparison
baselines (equally spaced days, seeded random days averaged over trials,
every day), the reactive/proactive splits and the moving-average filter.
Aggregates are reported pooled (every selected observation weighs equally)
and per ticker with cross-ticker mean/median rows; observations with an
undefined change window reduce the count instead of being imputed.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .dates import DateRange, is_weekend
from .errors import CashtagsError
from .lexer import TickerLexicon
from .market import AFTER_LABELS, BEFORE_LABELS
from .signals import DailySummary, Signal, SignalClass, classify_buy_signal


class StrategyKind(Enum):
    ALL_DAYS = "all_days"
    MENTION_DAYS = "mention_days"
    BUY_SIGNAL_DAYS = "buy_signal_days"
    SELL_SIGNAL_DAYS = "sell_signal_days"
    EQUALLY_DISTRIBUTED = "equally_distributed"
    RANDOMLY_DISTRIBUTED = "randomly_distributed"
    REACTIVE_BUY = "reactive_buy"
    PROACTIVE_BUY = "proactive_buy"
    MA_FILTERED_BUY = "ma_filtered_buy"

    @property
    def needs_horizon(self) -> bool:
        return self in (StrategyKind.REACTIVE_BUY, StrategyKind.PROACTIVE_BUY)


MA_FILTER_MODES = ("any-below-ma", "all-below-ma")


@dataclass(frozen=True)
class StrategySpec:
    """What to select and over which date window."""

    kind: StrategyKind
    date_range: DateRange | None = None
    x: str | None = None  # horizon for reactive/proactive splits
    mode: str | None = None  # moving-average filter mode
    seed: int = 0
    trials: int = 5

    def __post_init__(self) -> None:
        if self.kind.needs_horizon:
            if self.x not in BEFORE_LABELS:
                raise ValueError(f"{self.kind.value} needs x in {BEFORE_LABELS}, got {self.x!r}")
        if self.kind is StrategyKind.MA_FILTERED_BUY and self.mode not in MA_FILTER_MODES:
            raise ValueError(f"ma_filtered_buy needs mode in {MA_FILTER_MODES}, got {self.mode!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class WindowStat:
    """Mean change, share of positive changes and observation count for one
    window; for cross-ticker mean/median rows ``n`` counts contributing
    tickers and may be fractional for trial-averaged reports."""

    avg_change: float | None
    success_rate: float | None
    n: float


@dataclass(frozen=True)
class SelectionStats:
    day_count: float
    after: Mapping[str, WindowStat]
    before: Mapping[str, WindowStat]
    avg_mentions: float | None
    avg_volatility: float | None
    avg_volume: float | None


@dataclass(frozen=True)
class EvaluationReport:
    strategy: StrategySpec
    tickers: tuple[str, ...]
    pooled: SelectionStats
    per_ticker: Mapping[str, SelectionStats]
    ticker_mean: SelectionStats
    ticker_median: SelectionStats
    trial_reports: tuple["EvaluationReport", ...] = ()


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values)


# --- baseline day selection --------------------------------------------------


def equally_distributed_days(
    total_days: int, n: int, weekend_of: Callable[[int], bool]
) -> list[int]:
    """1-based indices ``floor(D/n)*k + delta`` for k=1..n, clipped to D.

    ``delta`` is zero unless the stride is exactly 7 and every undisplaced
    index lands on a weekend, in which case half a stride shifts the pattern
    off the weekend (indices pushed past D are dropped, so the result may
    have fewer than n entries).
    """
    if not 1 <= n <= total_days:
        raise ValueError(f"need 1 <= n <= D, got n={n}, D={total_days}")
    stride = total_days // n
    delta = 0
    if stride == 7 and all(weekend_of(stride * k) for k in range(1, n + 1)):
        delta = int(total_days / n / 2)
    return [stride * k + delta for k in range(1, n + 1) if stride * k + delta <= total_days]


def _trial_seed(seed: int, trial: int) -> int:
    # Documented substream derivation: trials are independent of each other
    # and of evaluation order.
    return seed * 1_000_003 + trial


def random_days(total_days: int, n: int, seed: int, trials: int) -> list[list[int]]:
    """Per trial, n distinct 1-based day indices sampled without replacement.

    Generator: ``random.Random(seed * 1_000_003 + trial)`` feeding
    ``sample(range(1, D + 1), n)``; output sorted per trial. Deterministic
    for a given (seed, trials, D, n).
    """
    if not 0 <= n <= total_days:
        raise ValueError(f"need 0 <= n <= D, got n={n}, D={total_days}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    picks = []
    for trial in range(trials):
        rng = random.Random(_trial_seed(seed, trial))
        picks.append(sorted(rng.sample(range(1, total_days + 1), n)))
    return picks


# --- selection ---------------------------------------------------------------


def ma_filter(summaries: Iterable[DailySummary], mode: str) -> list[DailySummary]:
    """Buy days whose backward change sits below its 30-day moving average
    for at least one horizon ("any-below-ma") or for all three
    ("all-below-ma"); days with any undefined moving average are excluded."""
    if mode not in MA_FILTER_MODES:
        raise ValueError(f"unknown ma filter mode {mode!r}")
    selected = []
    for summary in summaries:
        if summary.signal is not Signal.BUY:
            continue
        below: list[bool] = []
        defined = True
        for x in BEFORE_LABELS:
            average = summary.ma_of_change[x]
            change = summary.change_before[x]
            if average is None or change is None:
                defined = False
                break
            below.append(change < average)
        if not defined:
            continue
        if (mode == "any-below-ma" and any(below)) or (mode == "all-below-ma" and all(below)):
            selected.append(summary)
    return selected


def _classifiable(summary: DailySummary, x: str) -> bool:
    return (
        summary.signal is Signal.BUY
        and summary.change_before[x] is not None
        and summary.change_after[x] is not None
    )


def _select_days(
    days: Sequence[DailySummary], spec: StrategySpec, trial: int | None = None
) -> list[DailySummary]:
    kind = spec.kind
    if kind is StrategyKind.ALL_DAYS:
        return list(days)
    if kind is StrategyKind.MENTION_DAYS:
        return [s for s in days if s.mention_count > 0]
    if kind is StrategyKind.BUY_SIGNAL_DAYS:
        return [s for s in days if s.signal is Signal.BUY]
    if kind is StrategyKind.SELL_SIGNAL_DAYS:
        return [s for s in days if s.signal is Signal.SELL]
    if kind is StrategyKind.REACTIVE_BUY:
        return [
            s
            for s in days
            if _classifiable(s, spec.x) and classify_buy_signal(s, spec.x) is SignalClass.REACTIVE
        ]
    if kind is StrategyKind.PROACTIVE_BUY:
        return [
            s
            for s in days
            if _classifiable(s, spec.x) and classify_buy_signal(s, spec.x) is SignalClass.PROACTIVE
        ]
    if kind is StrategyKind.MA_FILTERED_BUY:
        return ma_filter(days, spec.mode)
    # Baselines mirror the buy-signal count of the same ticker and window.
    n = sum(1 for s in days if s.signal is Signal.BUY)
    total = len(days)
    if n == 0 or total == 0:
        return []
    if kind is StrategyKind.EQUALLY_DISTRIBUTED:
        indices = equally_distributed_days(total, n, lambda i: is_weekend(days[i - 1].date))
    elif kind is StrategyKind.RANDOMLY_DISTRIBUTED:
        indices = random_days(total, n, spec.seed, spec.trials)[trial if trial is not None else 0]
    else:
        raise CashtagsError(f"unhandled strategy kind {kind}")
    return [days[i - 1] for i in indices]


# --- statistics --------------------------------------------------------------


def _window_stat(changes: list[float]) -> WindowStat:
    if not changes:
        return WindowStat(avg_change=None, success_rate=None, n=0)
    positive = sum(1 for c in changes if c > 0)
    return WindowStat(
        avg_change=_mean(changes),
        success_rate=positive / len(changes),
        n=len(changes),
    )


def _selection_stats(selected: Sequence[DailySummary]) -> SelectionStats:
    after = {
        label: _window_stat([s.change_after[label] for s in selected if s.change_after[label] is not None])
        for label in AFTER_LABELS
    }
    before = {
        label: _window_stat([s.change_before[label] for s in selected if s.change_before[label] is not None])
        for label in BEFORE_LABELS
    }
    if selected:
        mentions = _mean([float(s.mention_count) for s in selected])
        volatility = _mean([s.volatility for s in selected])
        volume = _mean([float(s.volume) for s in selected])
    else:
        mentions = volatility = volume = None
    return SelectionStats(
        day_count=len(selected),
        after=after,
        before=before,
        avg_mentions=mentions,
        avg_volatility=volatility,
        avg_volume=volume,
    )


def _cross_ticker(
    per_ticker: Mapping[str, SelectionStats], reduce: Callable[[Sequence[float]], float]
) -> SelectionStats:
    def reduce_windows(labels: Sequence[str], pick: str) -> dict[str, WindowStat]:
        out = {}
        for label in labels:
            avgs = []
            rates = []
            for stats in per_ticker.values():
                stat = getattr(stats, pick)[label]
                if stat.avg_change is not None:
                    avgs.append(stat.avg_change)
                if stat.success_rate is not None:
                    rates.append(stat.success_rate)
            out[label] = WindowStat(
                avg_change=reduce(avgs) if avgs else None,
                success_rate=reduce(rates) if rates else None,
                n=len(avgs),
            )
        return out

    def reduce_field(name: str) -> float | None:
        values = [
            getattr(stats, name) for stats in per_ticker.values() if getattr(stats, name) is not None
        ]
        return reduce(values) if values else None

    return SelectionStats(
        day_count=reduce_field("day_count") or 0.0,
        after=reduce_windows(AFTER_LABELS, "after"),
        before=reduce_windows(BEFORE_LABELS, "before"),
        avg_mentions=reduce_field("avg_mentions"),
        avg_volatility=reduce_field("avg_volatility"),
        avg_volume=reduce_field("avg_volume"),
    )


def restrict_range(summaries: Iterable[DailySummary], date_range: DateRange) -> list[DailySummary]:
    """Keep summaries whose date falls in the window. Forward change values
    reaching past the window stay defined: prices are known post-hoc."""
    return [s for s in summaries if s.date in date_range]


def _domain(
    summaries: Mapping[str, Sequence[DailySummary]],
    spec: StrategySpec,
    trading_days_only: bool,
) -> dict[str, list[DailySummary]]:
    domain: dict[str, list[DailySummary]] = {}
    for ticker in sorted(summaries):
        days = sorted(summaries[ticker], key=lambda s: s.date)
        if spec.date_range is not None:
            days = restrict_range(days, spec.date_range)
        if trading_days_only:
            days = [s for s in days if s.is_trading_day]
        domain[ticker] = days
    return domain


def _single_report(
    domain: Mapping[str, list[DailySummary]], spec: StrategySpec, trial: int | None = None
) -> EvaluationReport:
    per_ticker = {}
    pooled_selection: list[DailySummary] = []
    for ticker, days in domain.items():
        selected = _select_days(days, spec, trial)
        per_ticker[ticker] = _selection_stats(selected)
        pooled_selection.extend(selected)
    return EvaluationReport(
        strategy=spec,
        tickers=tuple(domain),
        pooled=_selection_stats(pooled_selection),
        per_ticker=per_ticker,
        ticker_mean=_cross_ticker(per_ticker, _mean),
        ticker_median=_cross_ticker(per_ticker, statistics.median),
    )


def _average_window(stats: Sequence[WindowStat]) -> WindowStat:
    avgs = [s.avg_change for s in stats if s.avg_change is not None]
    rates = [s.success_rate for s in stats if s.success_rate is not None]
    return WindowStat(
        avg_change=_mean(avgs) if avgs else None,
        success_rate=_mean(rates) if rates else None,
        n=_mean([s.n for s in stats]),
    )


def _average_selection(stats: Sequence[SelectionStats]) -> SelectionStats:
    def average_field(name: str) -> float | None:
        values = [getattr(s, name) for s in stats if getattr(s, name) is not None]
        return _mean(values) if values else None

    return SelectionStats(
        day_count=_mean([s.day_count for s in stats]),
        after={label: _average_window([s.after[label] for s in stats]) for label in AFTER_LABELS},
        before={label: _average_window([s.before[label] for s in stats]) for label in BEFORE_LABELS},
        avg_mentions=average_field("avg_mentions"),
        avg_volatility=average_field("avg_volatility"),
        avg_volume=average_field("avg_volume"),
    )


def evaluate_strategy(
    summaries: Mapping[str, Sequence[DailySummary]],
    spec: StrategySpec,
    *,
    trading_days_only: bool = False,
) -> EvaluationReport:
    """Evaluate one strategy over per-ticker summary lists.

    The random baseline evaluates each trial separately and averages the
    resulting reports cell-wise (so its counts may be fractional); the
    per-trial reports stay available on ``trial_reports``.
    """
    domain = _domain(summaries, spec, trading_days_only)
    if spec.kind is not StrategyKind.RANDOMLY_DISTRIBUTED:
        return _single_report(domain, spec)

    trial_reports = tuple(_single_report(domain, spec, trial) for trial in range(spec.trials))
    per_ticker = {
        ticker: _average_selection([r.per_ticker[ticker] for r in trial_reports])
        for ticker in domain
    }
    return EvaluationReport(
        strategy=spec,
        tickers=tuple(domain),
        pooled=_average_selection([r.pooled for r in trial_reports]),
        per_ticker=per_ticker,
        ticker_mean=_average_selection([r.ticker_mean for r in trial_reports]),
        ticker_median=_average_selection([r.ticker_median for r in trial_reports]),
        trial_reports=trial_reports,
    )


# --- portfolio ranking -------------------------------------------------------


def select_portfolio(
    mention_counts: Mapping[tuple[str, date], int],
    windows: Sequence[DateRange],
    k: int,
) -> tuple[list[list[tuple[str, int]]], list[str]]:
    """Top-k most mentioned tickers per window plus the cross-window
    intersection, ranked by total mentions descending with symbol-ascending
    tie-break. ``mention_counts`` maps (symbol, date) to a count."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rankings: list[list[tuple[str, int]]] = []
    member_sets: list[set[str]] = []
    for window in windows:
        totals: dict[str, int] = {}
        for (symbol, day), count in mention_counts.items():
            if count and day in window:
                totals[symbol] = totals.get(symbol, 0) + count
        ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))[:k]
        rankings.append(ranked)
        member_sets.append({symbol for symbol, _ in ranked})
    if member_sets:
        intersection = sorted(set.intersection(*member_sets))
    else:
        intersection = []
    return rankings, intersection


def sector_distribution(tickers: Iterable[str], lexicon: TickerLexicon) -> dict[str, int]:
    """Sector -> count over the given tickers; missing metadata counts as
    "unknown"."""
    counts: dict[str, int] = {}
    for symbol in tickers:
        sector = lexicon.sector_of.get(symbol, "unknown")
        counts[sector] = counts.get(sector, 0) + 1
    return dict(sorted(counts.items(), key=lambda item: (-item[1], item[0])))


# --- (de)serialization for cached evaluation artifacts ------------------------


def _window_to_dict(stat: WindowStat) -> dict:
    return {"avg_change": stat.avg_change, "success_rate": stat.success_rate, "n": stat.n}


def _stats_to_dict(stats: SelectionStats) -> dict:
    return {
        "day_count": stats.day_count,
        "after": {label: _window_to_dict(stats.after[label]) for label in AFTER_LABELS},
        "before": {label: _window_to_dict(stats.before[label]) for label in BEFORE_LABELS},
        "avg_mentions": stats.avg_mentions,
        "avg_volatility": stats.avg_volatility,
        "avg_volume": stats.avg_volume,
    }


def _spec_to_dict(spec: StrategySpec) -> dict:
    return {
        "kind": spec.kind.value,
        "date_range": None
        if spec.date_range is None
        else {"start": spec.date_range.start.isoformat(), "end": spec.date_range.end.isoformat()},
        "x": spec.x,
        "mode": spec.mode,
        "seed": spec.seed,
        "trials": spec.trials,
    }


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "strategy": _spec_to_dict(report.strategy),
        "tickers": list(report.tickers),
        "pooled": _stats_to_dict(report.pooled),
        "per_ticker": {t: _stats_to_dict(report.per_ticker[t]) for t in sorted(report.per_ticker)},
        "ticker_mean": _stats_to_dict(report.ticker_mean),
        "ticker_median": _stats_to_dict(report.ticker_median),
        "trials": [report_to_dict(r) for r in report.trial_reports],
    }


def _window_from_dict(data: dict) -> WindowStat:
    return WindowStat(
        avg_change=data["avg_change"], success_rate=data["success_rate"], n=data["n"]
    )


def _stats_from_dict(data: dict) -> SelectionStats:
    return SelectionStats(
        day_count=data["day_count"],
        after={label: _window_from_dict(data["after"][label]) for label in AFTER_LABELS},
        before={label: _window_from_dict(data["before"][label]) for label in BEFORE_LABELS},
        avg_mentions=data["avg_mentions"],
        avg_volatility=data["avg_volatility"],
        avg_volume=data["avg_volume"],
    )


def _spec_from_dict(data: dict) -> StrategySpec:
    date_range = data.get("date_range")
    return StrategySpec(
        kind=StrategyKind(data["kind"]),
        date_range=None
        if date_range is None
        else DateRange(date.fromisoformat(date_range["start"]), date.fromisoformat(date_range["end"])),
        x=data.get("x"),
        mode=data.get("mode"),
        seed=data.get("seed", 0),
        trials=data.get("trials", 5),
    )


def report_from_dict(data: dict) -> EvaluationReport:
    return EvaluationReport(
        strategy=_spec_from_dict(data["strategy"]),
        tickers=tuple(data["tickers"]),
        pooled=_stats_from_dict(data["pooled"]),
        per_ticker={t: _stats_from_dict(d) for t, d in data["per_ticker"].items()},
        ticker_mean=_stats_from_dict(data["ticker_mean"]),
        ticker_median=_stats_from_dict(data["ticker_median"]),
        trial_reports=tuple(report_from_dict(d) for d in data.get("trials", [])),
    )
