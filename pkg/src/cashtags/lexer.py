"""Ticker-mention detection and transaction-keyword counting.

Detection rules:

* a bare token is a mention iff it is 2-5 uppercase letters, appears in the
  lexicon and is not a ticker stop word (so ``GDP`` in a text never counts);
* a ``$``-prefixed token is a mention iff the remainder is 1-5 uppercase
  letters, regardless of lexicon membership (``$1000`` is excluded, ``$F``
  counts even though bare single letters never do);
* transaction keywords match whole tokens case-insensitively, with a small
  configurable inflection table per base word.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from . import kernel
from .errors import LexiconError

log = logging.getLogger(__name__)

MAX_SYMBOL_LEN = 5

TRANSACTION_GROUPS = ("buy", "hold", "sell", "call", "put")

DEFAULT_KEYWORD_INFLECTIONS: dict[str, tuple[str, ...]] = {
    "buy": ("buy", "buys", "buying", "bought"),
    "hold": ("hold", "holds", "holding", "held"),
    "sell": ("sell", "sells", "selling", "sold"),
    "call": ("call", "calls"),
    "put": ("put", "puts"),
}

tokenize = kernel.tokenize


@dataclass(frozen=True)
class TransactionCounts:
    """Occurrence counts of transaction keywords in one text or one day."""

    buy: int = 0
    hold: int = 0
    sell: int = 0
    call: int = 0
    put: int = 0

    def __add__(self, other: "TransactionCounts") -> "TransactionCounts":
        return TransactionCounts(
            self.buy + other.buy,
            self.hold + other.hold,
            self.sell + other.sell,
            self.call + other.call,
            self.put + other.put,
        )

    def total(self) -> int:
        return self.buy + self.hold + self.sell + self.call + self.put


@dataclass(frozen=True)
class TickerMention:
    """One detected ticker occurrence at ``token_index`` in the token stream."""

    symbol: str
    dollar_prefixed: bool
    token_index: int


@dataclass(frozen=True)
class KeywordTable:
    """Lowercase keyword -> index into TRANSACTION_GROUPS."""

    index: dict[str, int]

    @classmethod
    def from_inflections(cls, inflections: Mapping[str, Iterable[str]]) -> "KeywordTable":
        index: dict[str, int] = {}
        for group, words in inflections.items():
            if group not in TRANSACTION_GROUPS:
                raise ValueError(f"unknown transaction group {group!r}")
            position = TRANSACTION_GROUPS.index(group)
            for word in words:
                index[word.lower()] = position
        return cls(index=index)

    @classmethod
    def default(cls) -> "KeywordTable":
        return cls.from_inflections(DEFAULT_KEYWORD_INFLECTIONS)


_DEFAULT_TABLE = KeywordTable.default()
_NO_KEYWORDS: dict[str, int] = {}
_NO_SYMBOLS: frozenset[str] = frozenset()


@dataclass(frozen=True)
class TickerLexicon:
    """Known stock/ETF symbols, per-symbol sector metadata and stop words.

    Stop-word exclusion wins over membership; symbols are uppercase,
    1-5 alphabetic characters.
    """

    known_tickers: frozenset[str]
    ticker_stopwords: frozenset[str]
    sector_of: Mapping[str, str]
    skipped_rows: int = 0


def _valid_symbol(symbol: str) -> bool:
    return 1 <= len(symbol) <= MAX_SYMBOL_LEN and symbol.isalpha() and symbol.isascii()


def _read_symbol_lines(path: Path) -> Iterable[str]:
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def load_lexicon(ticker_table: Path, etf_list: Path, stopword_list: Path) -> TickerLexicon:
    """Build a lexicon from a symbol CSV, an ETF list and a stop-word list.

    The CSV needs columns symbol,name,sector (sector may be empty); rows with
    non-alphabetic or over-long symbols are skipped and counted. Raises
    :class:`LexiconError` if a file is unreadable or no valid symbol remains.
    """
    ticker_table = Path(ticker_table)
    etf_list = Path(etf_list)
    stopword_list = Path(stopword_list)

    known: set[str] = set()
    sectors: dict[str, str] = {}
    skipped = 0
    try:
        with ticker_table.open(newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            fields = set(reader.fieldnames or ())
            missing = {"symbol", "name", "sector"} - fields
            if missing:
                raise LexiconError(
                    f"{ticker_table}: missing column(s) {', '.join(sorted(missing))}"
                )
            for row in reader:
                symbol = (row.get("symbol") or "").strip().upper()
                if not _valid_symbol(symbol):
                    skipped += 1
                    continue
                known.add(symbol)
                sector = (row.get("sector") or "").strip()
                if sector:
                    sectors[symbol] = sector
    except OSError as exc:
        raise LexiconError(f"cannot read ticker table {ticker_table}: {exc}") from exc

    try:
        for line in _read_symbol_lines(etf_list):
            symbol = line.upper()
            if _valid_symbol(symbol):
                known.add(symbol)
            else:
                skipped += 1
    except OSError as exc:
        raise LexiconError(f"cannot read ETF list {etf_list}: {exc}") from exc

    stopwords: set[str] = set()
    try:
        for line in _read_symbol_lines(stopword_list):
            stopwords.add(line.upper())
    except OSError as exc:
        raise LexiconError(f"cannot read stopword list {stopword_list}: {exc}") from exc

    if not known:
        raise LexiconError(f"no valid ticker symbols loaded from {ticker_table} / {etf_list}")
    if skipped:
        log.warning("lexicon: skipped %d invalid symbol row(s)", skipped)
    return TickerLexicon(
        known_tickers=frozenset(known),
        ticker_stopwords=frozenset(stopwords),
        sector_of=sectors,
        skipped_rows=skipped,
    )


def detect_tickers(text: str, lexicon: TickerLexicon) -> list[TickerMention]:
    """Every ticker occurrence in ``text``, in token order (not deduplicated)."""
    raw, _ = kernel.scan(
        text, lexicon.known_tickers, lexicon.ticker_stopwords, _NO_KEYWORDS, 0
    )
    return [TickerMention(sym, dollar, idx) for sym, dollar, idx in raw]


def count_transaction_words(text: str, table: KeywordTable | None = None) -> TransactionCounts:
    """Whole-token, case-insensitive keyword occurrence counts."""
    table = table or _DEFAULT_TABLE
    _, counts = kernel.scan(text, _NO_SYMBOLS, _NO_SYMBOLS, table.index, len(TRANSACTION_GROUPS))
    return TransactionCounts(*counts)


def scan_text(
    text: str, lexicon: TickerLexicon, table: KeywordTable | None = None
) -> tuple[list[TickerMention], TransactionCounts]:
    """Mentions and keyword counts in one pass (the aggregation hot path)."""
    table = table or _DEFAULT_TABLE
    raw, counts = kernel.scan(
        text,
        lexicon.known_tickers,
        lexicon.ticker_stopwords,
        table.index,
        len(TRANSACTION_GROUPS),
    )
    mentions = [TickerMention(sym, dollar, idx) for sym, dollar, idx in raw]
    return mentions, TransactionCounts(*counts)
