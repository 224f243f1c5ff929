"""Table rendering for evaluation results.

Each table is a (headers, rows) matrix of preformatted cells rendered to CSV
or aligned text; the two formats always carry identical values. Undefined
cells are "NA"; percent values use two decimals.
"""

from __future__ import annotations

import csv
import io
from typing import Mapping, Sequence

from .backtest import EvaluationReport, SelectionStats
from .market import AFTER_LABELS, BEFORE_LABELS

WINDOW_TITLES = {"1d": "1 day", "3d": "3 days", "1w": "1 week", "1m": "1 month", "3m": "3 months"}

# Canonical column labels for the strategy-comparison tables.
STRATEGY_TITLES = {
    "reference_all": "S&P500",
    "all": "All",
    "mention": "w/ Mention",
    "buy_signal": "w/ Buy Sig.",
    "sell_signal": "w/ Sell Sig.",
    "equally_distributed": "Eq. Distr.",
    "randomly_distributed": "Rnd. Distr.",
}

SUCCESS_ROW_TITLES = {
    "buy_signal": "buy signals",
    "equally_distributed": "equally distr.",
    "randomly_distributed": "randomly distr.",
    "all": "every day",
}

OVERVIEW_WINDOWS = ("1d", "1w", "1m", "3m")

Table = tuple[list[str], list[list[str]]]


def fmt_change(value: float | None) -> str:
    return "NA" if value is None else f"{value:.2f}"


def fmt_rate(value: float | None) -> str:
    """Success ratio as a percentage with two decimals."""
    return "NA" if value is None else f"{100.0 * value:.2f}"


def fmt_ratio_pct(value: float | None) -> str:
    return "NA" if value is None else f"{100.0 * value:.2f}"


def fmt_volume(value: float | None) -> str:
    if value is None:
        return "NA"
    for divisor, suffix in ((1e12, "T"), (1e9, "B"), (1e6, "M"), (1e3, "K")):
        if abs(value) >= divisor:
            return f"{value / divisor:.2f}{suffix}"
    return f"{value:.2f}"


def fmt_count(value: float | None) -> str:
    if value is None:
        return "NA"
    if float(value).is_integer():
        return str(int(value))
    return f"{value:.2f}"


def render_table(table: Table, fmt: str) -> str:
    headers, rows = table
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(rows)
        return buffer.getvalue()
    if fmt == "text":
        matrix = [headers] + rows
        widths = [max(len(row[i]) for row in matrix) for i in range(len(headers))]
        lines = []
        for row in matrix:
            lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r} (expected 'csv' or 'text')")


def _pick(stats_by_label: Mapping[str, EvaluationReport], label: str, aggregate: str) -> SelectionStats:
    report = stats_by_label[label]
    return getattr(report, aggregate)


def strategy_overview_table(
    reports: Mapping[str, EvaluationReport],
    columns: Sequence[str],
    aggregate: str = "pooled",
) -> Table:
    """Average change per window plus activity averages, one column per
    strategy label (mirrors the published strategy-comparison layout)."""
    headers = ["metric", "window"] + [STRATEGY_TITLES.get(c, c) for c in columns]
    stats = {c: _pick(reports, c, aggregate) for c in columns}
    rows: list[list[str]] = []
    for i, window in enumerate(OVERVIEW_WINDOWS):
        label = "Avg. price change (%) after" if i == 0 else ""
        rows.append(
            [label, WINDOW_TITLES[window]]
            + [fmt_change(stats[c].after[window].avg_change) for c in columns]
        )
    rows.append(["Average", "mentions"] + [fmt_change(stats[c].avg_mentions) for c in columns])
    rows.append(["", "daily volat."] + [fmt_ratio_pct(stats[c].avg_volatility) for c in columns])
    rows.append(["", "daily volume"] + [fmt_volume(stats[c].avg_volume) for c in columns])
    return headers, rows


def success_rate_table(
    reports: Mapping[str, EvaluationReport],
    rows_order: Sequence[str] = ("buy_signal", "equally_distributed", "randomly_distributed", "all"),
    aggregate: str = "ticker_mean",
) -> Table:
    """Success rate (%) per strategy and window; averaged across tickers by
    default, matching the published buy-signal reliability layout."""
    headers = ["strategy"] + [WINDOW_TITLES[w] for w in AFTER_LABELS]
    rows = []
    for label in rows_order:
        stats = _pick(reports, label, aggregate)
        rows.append(
            [SUCCESS_ROW_TITLES.get(label, label)]
            + [fmt_rate(stats.after[w].success_rate) for w in AFTER_LABELS]
        )
    return headers, rows


def per_ticker_table(all_report: EvaluationReport, buy_report: EvaluationReport) -> Table:
    """Per ticker, average price change on all days vs after buy signals."""
    headers = ["ticker", "pattern"] + [WINDOW_TITLES[w] for w in OVERVIEW_WINDOWS]
    rows = []
    for ticker in sorted(all_report.per_ticker):
        average = all_report.per_ticker[ticker]
        buy = buy_report.per_ticker.get(ticker)
        rows.append(
            [ticker, "Average"] + [fmt_change(average.after[w].avg_change) for w in OVERVIEW_WINDOWS]
        )
        rows.append(
            ["", "Buy Signal"]
            + [fmt_change(buy.after[w].avg_change if buy else None) for w in OVERVIEW_WINDOWS]
        )
    return headers, rows


def _since_after_rows(columns: Sequence[SelectionStats]) -> list[list[str]]:
    rows = []
    for i, window in enumerate(reversed(BEFORE_LABELS)):
        label = "% chg. since" if i == 0 else ""
        rows.append(
            [label, window] + [fmt_change(stats.before[window].avg_change) for stats in columns]
        )
    for i, window in enumerate(AFTER_LABELS):
        label = "% chg. after" if i == 0 else ""
        rows.append(
            [label, window] + [fmt_change(stats.after[window].avg_change) for stats in columns]
        )
    return rows


def reactive_proactive_table(
    reports: Mapping[str, EvaluationReport], aggregate: str = "pooled"
) -> Table:
    """Price development before/after buy signals: all days, all buy signals,
    and the reactive/proactive splits per detection horizon."""
    column_labels = (
        ["all", "buy_signal"]
        + [f"reactive_buy_{x}" for x in BEFORE_LABELS]
        + [f"proactive_buy_{x}" for x in BEFORE_LABELS]
    )
    headers = (
        ["metric", "window", "Avg", "Buy Sig."]
        + [f"React. x={x}" for x in BEFORE_LABELS]
        + [f"Proact. x={x}" for x in BEFORE_LABELS]
    )
    columns = [_pick(reports, label, aggregate) for label in column_labels]
    return headers, _since_after_rows(columns)


def phase_overview_table(
    full: Mapping[str, EvaluationReport],
    pre_hype: Mapping[str, EvaluationReport],
    aggregate: str = "pooled",
) -> Table:
    """Full-range vs pre-hype comparison for all days and buy-signal days."""
    headers = [
        "metric",
        "window",
        "All (full)",
        "w/ Buy Sig. (full)",
        "All (pre-hype)",
        "w/ Buy Sig. (pre-hype)",
    ]
    stats = [
        _pick(full, "all", aggregate),
        _pick(full, "buy_signal", aggregate),
        _pick(pre_hype, "all", aggregate),
        _pick(pre_hype, "buy_signal", aggregate),
    ]
    rows: list[list[str]] = []
    for i, window in enumerate(OVERVIEW_WINDOWS):
        label = "Avg. price change (%) after" if i == 0 else ""
        rows.append([label, WINDOW_TITLES[window]] + [fmt_change(s.after[window].avg_change) for s in stats])
    rows.append(["Average", "mentions"] + [fmt_change(s.avg_mentions) for s in stats])
    rows.append(["", "daily volat."] + [fmt_ratio_pct(s.avg_volatility) for s in stats])
    rows.append(["", "daily volume"] + [fmt_volume(s.avg_volume) for s in stats])
    return headers, rows


def phase_signal_table(
    full: Mapping[str, EvaluationReport],
    pre_hype: Mapping[str, EvaluationReport],
    aggregate: str = "pooled",
) -> Table:
    """Full-range vs pre-hype price development around buy signals, split
    into reactive and proactive (1-day and 1-week horizons)."""
    labels = ["buy_signal", "reactive_buy_1d", "reactive_buy_1w", "proactive_buy_1d", "proactive_buy_1w"]
    titles = ["All Buy", "React. 1d", "React. 1w", "Proact. 1d", "Proact. 1w"]
    headers = (
        ["metric", "window"]
        + [f"{t} (full)" for t in titles]
        + [f"{t} (pre-hype)" for t in titles]
    )
    columns = [_pick(full, label, aggregate) for label in labels] + [
        _pick(pre_hype, label, aggregate) for label in labels
    ]
    return headers, _since_after_rows(columns)


def report_detail_table(report: EvaluationReport) -> Table:
    """Everything one evaluation produced: pooled, cross-ticker mean/median
    and per-ticker columns."""
    tickers = sorted(report.per_ticker)
    headers = ["metric", "window", "pooled", "mean", "median"] + tickers

    def stat_columns(getter) -> list[str]:
        columns = [report.pooled, report.ticker_mean, report.ticker_median]
        columns += [report.per_ticker[t] for t in tickers]
        return [getter(stats) for stats in columns]

    rows: list[list[str]] = []
    for i, window in enumerate(AFTER_LABELS):
        label = "avg change (%) after" if i == 0 else ""
        rows.append([label, window] + stat_columns(lambda s, w=window: fmt_change(s.after[w].avg_change)))
    for i, window in enumerate(AFTER_LABELS):
        label = "success rate (%) after" if i == 0 else ""
        rows.append([label, window] + stat_columns(lambda s, w=window: fmt_rate(s.after[w].success_rate)))
    for i, window in enumerate(AFTER_LABELS):
        label = "n after" if i == 0 else ""
        rows.append([label, window] + stat_columns(lambda s, w=window: fmt_count(s.after[w].n)))
    for i, window in enumerate(BEFORE_LABELS):
        label = "avg change (%) since" if i == 0 else ""
        rows.append([label, window] + stat_columns(lambda s, w=window: fmt_change(s.before[w].avg_change)))
    rows.append(["average", "mentions"] + stat_columns(lambda s: fmt_change(s.avg_mentions)))
    rows.append(["", "daily volat. (%)"] + stat_columns(lambda s: fmt_ratio_pct(s.avg_volatility)))
    rows.append(["", "daily volume"] + stat_columns(lambda s: fmt_volume(s.avg_volume)))
    rows.append(["selected", "days"] + stat_columns(lambda s: fmt_count(s.day_count)))
    return headers, rows


def render_report(report: EvaluationReport, fmt: str) -> str:
    """Render one evaluation as CSV or aligned text (same values either way)."""
    return render_table(report_detail_table(report), fmt)
