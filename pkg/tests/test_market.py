from __future__ import annotations

import math
import random
from datetime import date, timedelta

import pytest

from cashtags.dates import DateRange
from cashtags.errors import CoverageError, PriceFormatError
from cashtags.market import (
    PriceBar,
    RawBar,
    WindowConfig,
    calendar_fill,
    compute_relative_volatility,
    compute_window_features,
    load_price_series,
)

import oracles
from helpers import close_enough


def bar(day: date, close: float, high=None, low=None, volume=1000) -> RawBar:
    high = close if high is None else high
    low = close if low is None else low
    return RawBar(day, close, high, low, close, volume)


def write_csv(path, rows):
    lines = ["date,open,high,low,close,volume"] + rows
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestLoadPriceSeries:
    def test_two_rows(self, tmp_path):
        path = tmp_path / "GME.csv"
        write_csv(path, ["2019-01-02,10,11,9,10.5,100", "2019-01-03,10.5,12,10,11,200"])
        bars = load_price_series(path, "GME")
        assert len(bars) == 2
        assert bars[0].date == date(2019, 1, 2)
        assert bars[1].close == 11.0

    def test_zero_close_reports_line(self, tmp_path):
        path = tmp_path / "GME.csv"
        write_csv(path, ["2019-01-02,10,11,9,10.5,100", "2019-01-03,0,0,0,0,0"])
        with pytest.raises(PriceFormatError) as err:
            load_price_series(path, "GME")
        assert err.value.line_no == 3

    def test_non_monotonic_dates(self, tmp_path):
        path = tmp_path / "GME.csv"
        write_csv(path, ["2019-01-03,10,11,9,10.5,100", "2019-01-02,10,11,9,10.5,100"])
        with pytest.raises(PriceFormatError):
            load_price_series(path, "GME")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "GME.csv"
        path.write_text("day,open,high,low,close,volume\n", encoding="utf-8")
        with pytest.raises(PriceFormatError):
            load_price_series(path, "GME")

    def test_low_above_high(self, tmp_path):
        path = tmp_path / "GME.csv"
        write_csv(path, ["2019-01-02,10,9,11,10,100"])
        with pytest.raises(PriceFormatError):
            load_price_series(path, "GME")

    def test_synthetic_year_matches_reparse(self, tmp_path):
        rng = random.Random(12)
        day = date(2019, 1, 2)
        rows = []
        close = 50.0
        for _ in range(252):
            while day.weekday() >= 5:
                day += timedelta(days=1)
            close *= math.exp(rng.gauss(0, 0.02))
            high = close * 1.01
            low = close * 0.99
            rows.append(f"{day.isoformat()},{close:.4f},{high:.4f},{low:.4f},{close:.4f},{rng.randint(1, 10**6)}")
            day += timedelta(days=1)
        path = tmp_path / "SYN.csv"
        write_csv(path, rows)
        bars = load_price_series(path, "SYN")
        expected = oracles.read_price_csv(path)
        assert len(bars) == 252
        assert [(b.date, b.high, b.low, b.close, b.volume) for b in bars] == expected


class TestCalendarFill:
    def test_weekend_fill_carries_friday_close(self):
        friday = date(2019, 1, 4)
        series = calendar_fill(
            [bar(friday, 30.0, high=31, low=29)],
            DateRange(friday, friday + timedelta(days=2)),
        )
        saturday, sunday = series.bars[1], series.bars[2]
        for filled in (saturday, sunday):
            assert filled.close == filled.high == filled.low == 30.0
            assert filled.volume == 0
            assert not filled.is_trading_day

    def test_single_trading_day_is_noop(self):
        day = date(2019, 1, 2)
        series = calendar_fill([bar(day, 10.0, high=11, low=9)], DateRange(day, day))
        assert len(series.bars) == 1
        assert series.bars[0].is_trading_day
        assert series.bars[0].high == 11

    def test_midweek_holiday_filled(self):
        monday = date(2019, 1, 7)
        wednesday = monday + timedelta(days=2)
        series = calendar_fill(
            [bar(monday, 10.0), bar(wednesday, 12.0)], DateRange(monday, wednesday)
        )
        tuesday = series.bars[1]
        assert not tuesday.is_trading_day
        assert tuesday.close == 10.0
        assert series.bars[2].close == 12.0

    def test_uncovered_prefix_error_lists_dates(self):
        monday = date(2019, 1, 7)
        with pytest.raises(CoverageError) as err:
            calendar_fill([bar(monday, 10.0)], DateRange(monday - timedelta(days=3), monday))
        assert list(err.value.missing_dates) == [
            monday - timedelta(days=3),
            monday - timedelta(days=2),
            monday - timedelta(days=1),
        ]

    def test_seed_bar_before_range_start(self):
        thursday = date(2019, 1, 3)
        series = calendar_fill(
            [bar(thursday, 20.0)], DateRange(thursday + timedelta(days=1), thursday + timedelta(days=2))
        )
        assert all(b.close == 20.0 for b in series.bars)

    def test_randomized_calendars_harbor_no_gaps(self):
        rng = random.Random(2024)
        for _ in range(200):
            start = date(2019, 1, 1) + timedelta(days=rng.randrange(300))
            span = rng.randrange(5, 80)
            trading = [start + timedelta(days=offset) for offset in range(span) if rng.random() < 0.6]
            if not trading or trading[0] != start:
                trading = [start] + trading
            bars = []
            close = 10.0
            seen = set()
            for day in trading:
                if day in seen:
                    continue
                seen.add(day)
                close *= 1 + rng.uniform(-0.05, 0.05)
                bars.append(bar(day, close, high=close * 1.02, low=close * 0.98))
            series = calendar_fill(bars, DateRange(start, start + timedelta(days=span - 1)))
            assert len(series.bars) == span
            for previous, current in zip(series.bars, series.bars[1:]):
                assert (current.date - previous.date).days == 1
                if not current.is_trading_day:
                    assert current.high == current.low == current.close == previous.close
                    assert current.volume == 0


class TestVolatility:
    def test_formula(self):
        day_bar = PriceBar(date(2019, 1, 2), high=11, low=9, close=10, volume=5, is_trading_day=True)
        assert compute_relative_volatility(day_bar) == pytest.approx(0.2)

    def test_filled_day_is_exactly_zero(self):
        filled = PriceBar(date(2019, 1, 5), high=30, low=30, close=30, volume=0, is_trading_day=False)
        assert compute_relative_volatility(filled) == 0.0

    def test_degenerate_trading_day(self):
        flat = PriceBar(date(2019, 1, 2), high=10, low=10, close=10, volume=5, is_trading_day=True)
        assert compute_relative_volatility(flat) == 0.0


def random_walk_series(seed: int, days: int, start: date = date(2019, 1, 1)):
    rng = random.Random(seed)
    bars = []
    close = 100.0
    for offset in range(days):
        day = start + timedelta(days=offset)
        if day.weekday() < 5 and rng.random() > 0.05:
            close *= math.exp(rng.gauss(0, 0.03))
            bars.append(bar(day, close, high=close * (1 + rng.random() * 0.02), low=close * (1 - rng.random() * 0.02)))
    if not bars or bars[0].date != start:
        bars.insert(0, bar(start, 100.0))
    return calendar_fill(bars, DateRange(start, start + timedelta(days=days - 1)))


class TestWindowFeatures:
    def test_one_day_change(self):
        day = date(2019, 1, 1)
        series = calendar_fill([bar(day, 10.0), bar(day + timedelta(days=1), 11.0)], DateRange(day, day + timedelta(days=1)))
        featured = compute_window_features(series)
        assert featured.change_before["1d"][1] == pytest.approx(10.0)
        assert featured.change_before["1d"][0] is None
        assert featured.change_after["1d"][0] == pytest.approx(10.0)

    def test_constant_series_all_zero(self):
        day = date(2019, 1, 1)
        bars = [bar(day + timedelta(days=i), 42.0) for i in range(120)]
        featured = compute_window_features(calendar_fill(bars, DateRange(day, day + timedelta(days=119))))
        for label, values in featured.change_before.items():
            assert all(v == 0.0 for v in values if v is not None)
        for values in featured.ma_of_change.values():
            assert all(v == 0.0 for v in values if v is not None)

    def test_out_of_range_windows_are_none_not_zero(self):
        featured = compute_window_features(random_walk_series(5, 50))
        assert featured.change_after["3m"][0] is None  # only 50 days of data
        assert featured.change_before["1w"][3] is None

    def test_matches_naive_oracle(self):
        featured = compute_window_features(random_walk_series(77, 300))
        closes = [b.close for b in featured.bars]
        windows = WindowConfig()
        for label, delta in windows.before_windows().items():
            expected = oracles.change_series(closes, delta, "before")
            for ours, theirs in zip(featured.change_before[label], expected):
                assert close_enough(ours, theirs)
            expected_ma = oracles.trailing_mean(expected, windows.ma_days)
            for ours, theirs in zip(featured.ma_of_change[label], expected_ma):
                assert close_enough(ours, theirs)
        for label, delta in windows.after_windows().items():
            expected = oracles.change_series(closes, delta, "after")
            for ours, theirs in zip(featured.change_after[label], expected):
                assert close_enough(ours, theirs)

    def test_after_equals_before_shifted(self):
        featured = compute_window_features(random_walk_series(123, 200))
        windows = WindowConfig()
        for label, delta in windows.after_windows().items():
            if label not in featured.change_before:
                continue
            after = featured.change_after[label]
            before = featured.change_before[label]
            for t in range(len(after)):
                if t + delta < len(after) and after[t] is not None and before[t + delta] is not None:
                    assert after[t] == before[t + delta]  # exact identity

    def test_scale_invariance(self):
        base = random_walk_series(9, 250)
        scaled_bars = [
            RawBar(b.date, b.close * 7.3, b.high * 7.3, b.low * 7.3, b.close * 7.3, b.volume)
            for b in base.bars
            if b.is_trading_day
        ]
        scaled = calendar_fill(scaled_bars, DateRange(base.start, base.end))
        featured_base = compute_window_features(base)
        featured_scaled = compute_window_features(scaled)
        for label in featured_base.change_before:
            for a, b in zip(featured_base.change_before[label], featured_scaled.change_before[label]):
                assert close_enough(a, b)
        for a, b in zip(featured_base.rel_volatility, featured_scaled.rel_volatility):
            assert close_enough(a, b)

    def test_volatility_nonnegative_zero_iff_flat(self):
        featured = compute_window_features(random_walk_series(31, 150))
        for day_bar, vol in zip(featured.bars, featured.rel_volatility):
            assert vol >= 0
            if day_bar.is_trading_day:
                assert (vol == 0) == (day_bar.high == day_bar.low)
            else:
                assert vol == 0.0

    def test_ma_warm_up_boundary(self):
        featured = compute_window_features(random_walk_series(45, 120))
        windows = WindowConfig()
        for label, delta in windows.before_windows().items():
            values = featured.ma_of_change[label]
            boundary = windows.ma_days + delta
            assert all(v is None for v in values[:boundary])
            assert all(v is not None for v in values[boundary:])

    def test_custom_window_lengths(self):
        series = random_walk_series(8, 200)
        featured = compute_window_features(series, WindowConfig(week_days=5, month_days=21, quarter_days=63))
        closes = [b.close for b in featured.bars]
        expected = oracles.change_series(closes, 21, "after")
        for ours, theirs in zip(featured.change_after["1m"], expected):
            assert close_enough(ours, theirs)
