"""Daily OHLCV series: loading, calendar fill and derived price features.

Non-trading days are materialized by carrying the previous close forward
with zero volume, so every window arithmetic below runs on plain calendar
days. Change windows are percentages; undefined values (outside the covered
range or inside the moving-average warm-up) stay ``None`` and are never
imputed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Mapping, NamedTuple, Sequence

from .dates import ONE_DAY, DateRange
from .errors import CoverageError, PriceFormatError

BEFORE_LABELS = ("1d", "3d", "1w")
AFTER_LABELS = ("1d", "3d", "1w", "1m", "3m")

PRICE_CSV_HEADER = ["date", "open", "high", "low", "close", "volume"]


@dataclass(frozen=True)
class WindowConfig:
    """Window lengths in calendar days; only the multi-day ones are tunable."""

    week_days: int = 7
    month_days: int = 30
    quarter_days: int = 90
    ma_days: int = 30

    def before_windows(self) -> dict[str, int]:
        return {"1d": 1, "3d": 3, "1w": self.week_days}

    def after_windows(self) -> dict[str, int]:
        return {
            "1d": 1,
            "3d": 3,
            "1w": self.week_days,
            "1m": self.month_days,
            "3m": self.quarter_days,
        }


class RawBar(NamedTuple):
    date: date
    open: float
    high: float
    low: float
    close: float
    volume: int


@dataclass(frozen=True)
class PriceBar:
    """One calendar day; filled (non-trading) bars carry the previous close."""

    date: date
    high: float
    low: float
    close: float
    volume: int
    is_trading_day: bool


@dataclass(frozen=True)
class PriceSeries:
    """Calendar-contiguous daily bars with optional derived features.

    ``change_before``/``change_after``/``ma_of_change`` map window labels to
    per-day tuples aligned with ``bars``; ``None`` entries are undefined.
    """

    ticker: str
    bars: tuple[PriceBar, ...]
    windows: WindowConfig = field(default_factory=WindowConfig)
    rel_volatility: tuple[float, ...] | None = None
    change_before: Mapping[str, tuple[float | None, ...]] | None = None
    change_after: Mapping[str, tuple[float | None, ...]] | None = None
    ma_of_change: Mapping[str, tuple[float | None, ...]] | None = None

    @property
    def start(self) -> date:
        return self.bars[0].date

    @property
    def end(self) -> date:
        return self.bars[-1].date

    def index_of(self, day: date) -> int | None:
        offset = (day - self.start).days
        if 0 <= offset < len(self.bars):
            return offset
        return None


def load_price_series(csv_path: Path, ticker: str) -> list[RawBar]:
    """Parse one trading-day-per-row price CSV (header date,open,high,low,close,volume).

    Rows must be in ascending date order with positive closes and low <= high;
    violations raise :class:`PriceFormatError` with the offending line number.
    """
    csv_path = Path(csv_path)
    bars: list[RawBar] = []
    with csv_path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != PRICE_CSV_HEADER:
            raise PriceFormatError(
                f"{csv_path}: expected header {','.join(PRICE_CSV_HEADER)!r}, got {header!r}"
            )
        previous: date | None = None
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise PriceFormatError(f"{csv_path}: expected 6 fields, got {len(row)}", line_no)
            try:
                day = date.fromisoformat(row[0])
                open_, high, low, close = (float(v) for v in row[1:5])
                volume = int(row[5])
            except ValueError as exc:
                raise PriceFormatError(f"{csv_path}: {exc}", line_no) from exc
            if previous is not None and day <= previous:
                raise PriceFormatError(
                    f"{csv_path}: dates not strictly ascending ({day} after {previous})", line_no
                )
            if close <= 0:
                raise PriceFormatError(f"{csv_path}: non-positive close {close}", line_no)
            if low > high:
                raise PriceFormatError(f"{csv_path}: low {low} above high {high}", line_no)
            if volume < 0:
                raise PriceFormatError(f"{csv_path}: negative volume {volume}", line_no)
            previous = day
            bars.append(RawBar(day, open_, high, low, close, volume))
    return bars


def calendar_fill(bars: Sequence[RawBar], date_range: DateRange, ticker: str = "") -> PriceSeries:
    """Materialize one bar per calendar day in ``date_range``.

    Trading days keep their data; other days repeat the previous close as
    high/low/close with zero volume. Needs a trading bar at or before the
    range start, otherwise raises :class:`CoverageError` listing the
    uncovered leading dates.
    """
    by_day = {bar.date: bar for bar in bars}
    last_close: float | None = None
    for bar in bars:
        if bar.date > date_range.start:
            break
        last_close = bar.close
    if last_close is None:
        first_trading = min((bar.date for bar in bars), default=None)
        missing: list[date] = []
        day = date_range.start
        while day <= date_range.end and (first_trading is None or day < first_trading):
            missing.append(day)
            day += ONE_DAY
        raise CoverageError(
            f"{ticker or 'series'}: no trading bar at or before {date_range.start}; "
            f"{len(missing)} uncovered leading day(s)",
            missing_dates=missing,
        )

    filled: list[PriceBar] = []
    for day in date_range.iter_days():
        bar = by_day.get(day)
        if bar is not None:
            filled.append(
                PriceBar(day, high=bar.high, low=bar.low, close=bar.close, volume=bar.volume, is_trading_day=True)
            )
            last_close = bar.close
        else:
            filled.append(
                PriceBar(day, high=last_close, low=last_close, close=last_close, volume=0, is_trading_day=False)
            )
    return PriceSeries(ticker=ticker, bars=tuple(filled))


def compute_relative_volatility(bar: PriceBar) -> float:
    """(high - low) / close; exactly zero on filled non-trading days."""
    if not bar.is_trading_day:
        return 0.0
    return (bar.high - bar.low) / bar.close


def _percent_change(new: float, old: float) -> float:
    return 100.0 * (new - old) / old


def compute_window_features(series: PriceSeries, windows: WindowConfig | None = None) -> PriceSeries:
    """Derive volatility, backward/forward percent changes and trailing
    moving averages of the backward changes.

    The moving average at day t covers days t-ma..t-1 (the current day is
    excluded, so filters using it act only on information available before
    the day) and is defined only when every covered change value is.
    """
    windows = windows or series.windows
    closes = [bar.close for bar in series.bars]
    n = len(closes)

    change_before: dict[str, tuple[float | None, ...]] = {}
    for label, delta in windows.before_windows().items():
        change_before[label] = tuple(
            _percent_change(closes[t], closes[t - delta]) if t >= delta else None for t in range(n)
        )
    change_after: dict[str, tuple[float | None, ...]] = {}
    for label, delta in windows.after_windows().items():
        change_after[label] = tuple(
            _percent_change(closes[t + delta], closes[t]) if t + delta < n else None for t in range(n)
        )

    ma_days = windows.ma_days
    ma_of_change: dict[str, tuple[float | None, ...]] = {}
    for label, values in change_before.items():
        averaged: list[float | None] = []
        for t in range(n):
            window = values[t - ma_days : t] if t >= ma_days else []
            if len(window) == ma_days and None not in window:
                averaged.append(sum(window) / ma_days)
            else:
                averaged.append(None)
        ma_of_change[label] = tuple(averaged)

    volatility = tuple(compute_relative_volatility(bar) for bar in series.bars)
    return PriceSeries(
        ticker=series.ticker,
        bars=series.bars,
        windows=windows,
        rel_volatility=volatility,
        change_before=change_before,
        change_after=change_after,
        ma_of_change=ma_of_change,
    )
