"""Exception types shared across the package."""

from __future__ import annotations


class CashtagsError(Exception):
    """Base class for all errors raised by this package."""


class RecordRejectedError(CashtagsError):
    """A submission record is missing a required field or violates an invariant."""

    def __init__(self, message: str, record_id: str | None = None) -> None:
        super().__init__(message)
        self.record_id = record_id


class JsonLinesError(CashtagsError):
    """A JSON-lines input could not be parsed."""

    def __init__(self, message: str, path: str, byte_offset: int) -> None:
        super().__init__(f"{path}: {message} (byte offset {byte_offset})")
        self.path = path
        self.byte_offset = byte_offset


class CrawlError(CashtagsError):
    """The archive crawl failed; ``last_before`` is the cursor to resume from."""

    def __init__(self, message: str, last_before: int) -> None:
        super().__init__(f"{message} (resume with before={last_before})")
        self.last_before = last_before


class PaginationLoopError(CrawlError):
    """The archive returned a non-decreasing page cursor twice in a row."""


class LexiconError(CashtagsError):
    """A ticker lexicon input is unreadable or yields no valid symbols."""


class PriceFormatError(CashtagsError):
    """A price CSV violates the expected format."""

    def __init__(self, message: str, line_no: int | None = None) -> None:
        if line_no is not None:
            message = f"{message} (line {line_no})"
        super().__init__(message)
        self.line_no = line_no


class CoverageError(CashtagsError):
    """Market data does not cover the requested dates."""

    def __init__(self, message: str, missing_dates: tuple = ()) -> None:
        super().__init__(message)
        self.missing_dates = tuple(missing_dates)


class ConfigError(CashtagsError):
    """Pipeline configuration is invalid; ``problems`` lists field-level messages."""

    def __init__(self, problems: list[str]) -> None:
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in problems))
        self.problems = list(problems)


class PipelineError(CashtagsError):
    """A pipeline stage failed."""
