"""Shared test construction helpers."""

from __future__ import annotations

from datetime import date, timedelta

from cashtags.lexer import TransactionCounts
from cashtags.market import AFTER_LABELS, BEFORE_LABELS
from cashtags.signals import DailySummary, derive_daily_signal


def close_enough(a, b, tolerance=1e-9) -> bool:
    """Relative comparison with an absolute floor of the same tolerance."""
    if a is None or b is None:
        return a is None and b is None
    return abs(a - b) <= tolerance * max(abs(a), abs(b), 1.0)


def make_summary(
    ticker: str = "GME",
    day: date = date(2021, 1, 27),
    mentions: int = 0,
    buy: int = 0,
    hold: int = 0,
    sell: int = 0,
    call: int = 0,
    put: int = 0,
    close: float = 10.0,
    volume: int = 1_000,
    volatility: float = 0.02,
    trading: bool = True,
    before: dict | None = None,
    after: dict | None = None,
    ma: dict | None = None,
) -> DailySummary:
    tx = TransactionCounts(buy=buy, hold=hold, sell=sell, call=call, put=put)
    change_before = {x: None for x in BEFORE_LABELS}
    change_before.update(before or {})
    change_after = {y: None for y in AFTER_LABELS}
    change_after.update(after or {})
    ma_of_change = {x: None for x in BEFORE_LABELS}
    ma_of_change.update(ma or {})
    return DailySummary(
        ticker=ticker,
        date=day,
        mention_count=mentions,
        tx=tx,
        signal=derive_daily_signal(tx),
        close=close,
        volume=volume,
        volatility=volatility,
        is_trading_day=trading,
        change_before=change_before,
        change_after=change_after,
        ma_of_change=ma_of_change,
    )


def day_run(start: date, count: int) -> list[date]:
    return [start + timedelta(days=i) for i in range(count)]
