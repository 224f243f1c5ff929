"""Paginated archive-API client.

Walks a pushshift-style endpoint backwards in time: each page request sets
``before`` to the earliest ``created_utc`` of the previous page, until a page
is empty or dips below the requested start. Strictly sequential (the cursor
depends on the previous response) and rate limited.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Callable, Iterator

import requests

from .errors import CrawlError, PaginationLoopError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArchiveClientConfig:
    endpoint: str
    subreddit: str
    page_size: int = 100
    rate_limit: float = 1.0  # max requests per second
    max_attempts: int = 5
    backoff_base: float = 1.0  # seconds; doubled per retry
    score_filter: str = ">0"
    timeout: float = 30.0

    def __post_init__(self) -> None:
        if self.page_size < 1:
            raise ValueError("page_size must be >= 1")
        if self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


class _RateLimiter:
    """Enforces a minimum delay between consecutive requests."""

    def __init__(self, rate_limit: float, sleep: Callable[[float], None]) -> None:
        self.interval = 1.0 / rate_limit
        self._sleep = sleep
        self._next_allowed = 0.0

    def wait(self) -> None:
        now = time.monotonic()
        if now < self._next_allowed:
            self._sleep(self._next_allowed - now)
            now = time.monotonic()
        self._next_allowed = now + self.interval


def _fetch_page(
    session: requests.Session,
    config: ArchiveClientConfig,
    before: int,
    limiter: _RateLimiter,
    sleep: Callable[[float], None],
) -> list[dict]:
    params = {
        "subreddit": config.subreddit,
        "before": str(before),
        "size": str(config.page_size),
        "score": config.score_filter,
    }
    last_error: Exception | None = None
    for attempt in range(config.max_attempts):
        if attempt:
            sleep(config.backoff_base * 2 ** (attempt - 1))
        limiter.wait()
        try:
            response = session.get(config.endpoint, params=params, timeout=config.timeout)
            response.raise_for_status()
            payload = response.json()
        except (requests.RequestException, ValueError) as exc:
            last_error = exc
            log.warning("archive request failed (attempt %d/%d): %s", attempt + 1, config.max_attempts, exc)
            continue
        data = payload.get("data")
        if not isinstance(data, list):
            raise CrawlError("archive response has no 'data' array", last_before=before)
        return data
    raise CrawlError(f"archive request failed after {config.max_attempts} attempts: {last_error}", last_before=before)


def crawl_archive(
    config: ArchiveClientConfig,
    start: int,
    end: int,
    *,
    session: requests.Session | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> Iterator[dict]:
    """Yield raw records with ``start <= created_utc < end`` in fetched order.

    On persistent request failure raises :class:`CrawlError` carrying the
    cursor of the failed page, so a new crawl with ``end=err.last_before``
    resumes where this one stopped. A page whose earliest timestamp does not
    move the cursor back raises :class:`PaginationLoopError`.
    """
    if end <= start:
        raise ValueError(f"end ({end}) must be after start ({start})")
    own_session = session is None
    session = session or requests.Session()
    limiter = _RateLimiter(config.rate_limit, sleep)
    before = end
    try:
        while True:
            page = _fetch_page(session, config, before, limiter, sleep)
            if not page:
                return
            timestamps = []
            for record in page:
                created = record.get("created_utc")
                if not isinstance(created, int):
                    raise CrawlError(
                        f"record without integer created_utc in page before={before}",
                        last_before=before,
                    )
                timestamps.append(created)
                if created >= start:
                    yield record
            earliest = min(timestamps)
            if earliest < start:
                return
            if earliest >= before:
                raise PaginationLoopError(
                    f"cursor did not advance: earliest {earliest} >= before {before}",
                    last_before=before,
                )
            before = earliest
    finally:
        if own_session:
            session.close()
