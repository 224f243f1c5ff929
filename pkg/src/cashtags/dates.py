"""Calendar-day helpers. All timestamps in this package are UTC."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from typing import Iterator

ONE_DAY = timedelta(days=1)


def utc_date(created_utc: int) -> date:
    """UTC calendar day of a Unix timestamp."""
    return datetime.fromtimestamp(created_utc, tz=timezone.utc).date()


def is_weekend(day: date) -> bool:
    return day.weekday() >= 5


@dataclass(frozen=True)
class DateRange:
    """Inclusive interval of UTC calendar days."""

    start: date
    end: date

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"date range start {self.start} after end {self.end}")

    @classmethod
    def parse(cls, text: str) -> "DateRange":
        """Parse ``YYYY-MM-DD..YYYY-MM-DD``."""
        try:
            start_s, end_s = text.split("..", 1)
            return cls(date.fromisoformat(start_s.strip()), date.fromisoformat(end_s.strip()))
        except ValueError as exc:
            raise ValueError(f"bad date range {text!r}: {exc}") from exc

    def __contains__(self, day: date) -> bool:
        return self.start <= day <= self.end

    def days(self) -> int:
        return (self.end - self.start).days + 1

    def iter_days(self) -> Iterator[date]:
        day = self.start
        while day <= self.end:
            yield day
            day += ONE_DAY

    def day_at(self, index: int) -> date:
        """Day at 1-based ``index`` (day 1 is ``start``)."""
        if not 1 <= index <= self.days():
            raise IndexError(f"day index {index} outside 1..{self.days()}")
        return self.start + timedelta(days=index - 1)

    def intersect(self, other: "DateRange") -> "DateRange | None":
        start = max(self.start, other.start)
        end = min(self.end, other.end)
        return DateRange(start, end) if start <= end else None
