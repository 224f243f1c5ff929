"""Deterministic synthetic datasets for tests, demos and benchmarks.

Generates a corpus JSONL, per-ticker price CSVs, lexicon files and a wired
pipeline configuration under a target directory. Everything derives from one
seed, so repeated generation is byte-identical.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

from .dates import DateRange

SECTORS = {
    "GME": "Consumer Cyclical",
    "AMC": "Communication Services",
    "BB": "Technology",
    "TSLA": "Consumer Cyclical",
    "PLTR": "Technology",
    "AAPL": "Technology",
    "MSFT": "Technology",
    "NOK": "Technology",
    "GM": "Consumer Cyclical",
    "COST": "Consumer Defensive",
    "SHOP": "Technology",
    "NOW": "Technology",
    "CAR": "Consumer Cyclical",
    "CRM": "Technology",
    "F": "Consumer Cyclical",
    "NVDA": "Technology",
    "INTC": "Technology",
    "BA": "Industrials",
}

TICKER_STOPWORDS = ("GDP", "CAC", "CEO", "USA", "IMO", "YOLO", "EOD")

TEXT_STOPWORDS = (
    "the a an to of and in on is are was i my it this that for with at be"
).split()

FLAIRS = ("Discussion", "Meme", "DD", "YOLO", "Gain", "Loss", "News", "Shitpost")

_BUY_WORDS = ("buy", "Buy", "BUY", "buying", "bought", "buys")
_SELL_WORDS = ("sell", "Sell", "SELL", "selling", "sold", "sells")
_OTHER_WORDS = ("hold", "HOLD", "holding", "held", "call", "calls", "put", "puts")
_NOISE = (
    "to the moon", "diamond hands", "this is the way", "loss porn inside",
    "market looks shaky", "printer goes brr", "am I doing this right",
    "GDP numbers out today", "CEO said nothing", "paper hands everywhere",
)


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 7
    tickers: tuple[str, ...] = ("GME", "AMC", "BB", "TSLA", "PLTR")
    reference: str = "SPY"
    start: date = date(2020, 1, 6)  # a Monday
    days: int = 800
    submissions: int = 20_000

    @property
    def date_range(self) -> DateRange:
        return DateRange(self.start, self.start + timedelta(days=self.days - 1))


@dataclass(frozen=True)
class SynthPaths:
    root: Path
    config: Path
    corpus: Path
    price_dir: Path
    ticker_table: Path
    etf_list: Path
    ticker_stopwords: Path
    text_stopwords: Path
    output_dir: Path


def _ticker_expression(rng: random.Random, symbol: str) -> str:
    roll = rng.random()
    if roll < 0.35:
        return symbol
    if roll < 0.55:
        return f"${symbol}"
    if roll < 0.62:
        return symbol.lower()  # not detectable, on purpose
    if roll < 0.70:
        return f"({symbol})"
    if roll < 0.78:
        return f"{symbol},"
    if roll < 0.86:
        return f"${symbol}!"
    return f"{symbol}."


def _submission_title(rng: random.Random, symbols: list[str]) -> str:
    kind = rng.random()
    parts: list[str] = []
    if kind < 0.30:
        parts.append(rng.choice(_BUY_WORDS))
    elif kind < 0.48:
        parts.append(rng.choice(_SELL_WORDS))
    elif kind < 0.60:
        parts.append(rng.choice(_OTHER_WORDS))
    for symbol in symbols:
        parts.append(_ticker_expression(rng, symbol))
    if rng.random() < 0.2:
        parts.append("spent $1000 already")
    parts.append(rng.choice(_NOISE))
    return " ".join(parts)


def _submission_body(rng: random.Random, symbols: list[str]) -> str:
    sentences = []
    for _ in range(rng.randint(1, 4)):
        sentences.append(_submission_title(rng, [s for s in symbols if rng.random() < 0.5]))
    return ". ".join(sentences)


def _write_prices(rng: random.Random, path: Path, start: date, end: date) -> None:
    close = rng.uniform(15.0, 250.0)
    holidays = set()
    day = start
    while day <= end:
        if day.weekday() < 5 and rng.random() < 0.03:
            holidays.add(day)
        day += timedelta(days=1)
    lines = ["date,open,high,low,close,volume"]
    day = start
    while day <= end:
        if day.weekday() < 5 and day not in holidays:
            close *= math.exp(rng.gauss(0.0004, 0.025))
            spread_up = abs(rng.gauss(0.0, 0.012))
            spread_down = min(abs(rng.gauss(0.0, 0.012)), 0.5)
            open_ = close * (1 + rng.gauss(0.0, 0.005))
            high = close * (1 + spread_up)
            low = close * (1 - spread_down)
            low = min(low, open_, close)
            high = max(high, open_, close)
            volume = rng.randint(100_000, 60_000_000)
            lines.append(
                f"{day.isoformat()},{open_:.4f},{high:.4f},{low:.4f},{close:.4f},{volume}"
            )
        day += timedelta(days=1)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def generate_dataset(spec: SynthSpec, root: Path) -> SynthPaths:
    """Write the full fixture tree under ``root`` and return its paths."""
    root = Path(root)
    price_dir = root / "prices"
    lexicon_dir = root / "lexicon"
    output_dir = root / "out"
    for directory in (root, price_dir, lexicon_dir):
        directory.mkdir(parents=True, exist_ok=True)

    rng = random.Random(spec.seed)
    window = spec.date_range

    # Lexicon inputs.
    ticker_table = lexicon_dir / "tickers.csv"
    rows = ["symbol,name,sector"]
    for symbol, sector in sorted(SECTORS.items()):
        rows.append(f"{symbol},{symbol} Inc.,{sector}")
    rows.append("BRKA,No Sector Corp.,")  # exercises the 'unknown' sector bucket
    ticker_table.write_text("\n".join(rows) + "\n", encoding="utf-8")
    etf_list = lexicon_dir / "etfs.txt"
    etf_list.write_text("# exchange traded funds\nSPY\nQQQ\n", encoding="utf-8")
    ticker_stopwords = lexicon_dir / "ticker_stopwords.txt"
    ticker_stopwords.write_text(
        "# frequent uppercase non-tickers\n" + "\n".join(TICKER_STOPWORDS) + "\n", encoding="utf-8"
    )
    text_stopwords = root / "stopwords.txt"
    text_stopwords.write_text("\n".join(TEXT_STOPWORDS) + "\n", encoding="utf-8")

    # Prices: warm-up before the range for backward windows and the moving
    # average, post-range tail so forward windows stay defined near the end.
    price_start = window.start - timedelta(days=45)
    price_end = window.end + timedelta(days=100)
    for symbol in (*spec.tickers, spec.reference):
        _write_prices(rng, price_dir / f"{symbol}.csv", price_start, price_end)

    # Corpus.
    start_ts = int(datetime.combine(window.start, datetime.min.time(), tzinfo=timezone.utc).timestamp())
    end_ts = int(
        datetime.combine(window.end + timedelta(days=1), datetime.min.time(), tzinfo=timezone.utc).timestamp()
    )
    mentionable = list(spec.tickers) + ["AAPL", "MSFT", "NOK", "GM", "NVDA", "SPY", "GDP", "CAC"]
    corpus = root / "corpus.jsonl"
    with corpus.open("w", encoding="utf-8") as handle:
        for i in range(spec.submissions):
            count = rng.choices((0, 1, 2, 3), weights=(10, 60, 22, 8))[0]
            symbols = rng.sample(mentionable, count) if count else []
            record = {
                "id": f"s{i:06x}",
                "created_utc": rng.randrange(start_ts, end_ts),
                "title": _submission_title(rng, symbols),
                "score": rng.choices((0, 1, 2, 3, 5, 8, 21, 100), weights=(18, 30, 18, 12, 10, 6, 4, 2))[0],
            }
            roll = rng.random()
            if roll < 0.40:
                record["selftext"] = _submission_body(rng, symbols)
            elif roll < 0.43:
                record["selftext"] = rng.choice(("[deleted]", "[removed]"))
            elif roll < 0.46:
                record["selftext"] = ""
            if rng.random() < 0.85:
                record["flair"] = rng.choice(FLAIRS)
            record["author"] = "[deleted]" if rng.random() < 0.01 else f"user{rng.randrange(4000)}"
            record["num_comments"] = rng.randrange(0, 300)
            handle.write(json.dumps(record, sort_keys=True))
            handle.write("\n")

    half = window.start + timedelta(days=spec.days // 2)
    config_payload = {
        "corpus_files": ["corpus.jsonl"],
        "lexicon": {
            "ticker_table": "lexicon/tickers.csv",
            "etf_list": "lexicon/etfs.txt",
            "stopword_list": "lexicon/ticker_stopwords.txt",
        },
        "text_stopwords": "stopwords.txt",
        "price_dir": "prices",
        "output_dir": "out",
        "tickers": list(spec.tickers),
        "reference_ticker": spec.reference,
        "date_range": {"start": window.start.isoformat(), "end": window.end.isoformat()},
        "pre_hype_range": {
            "start": window.start.isoformat(),
            "end": (half - timedelta(days=1)).isoformat(),
        },
        "portfolio": {
            "k": 5,
            "windows": [
                {"start": window.start.isoformat(), "end": (half - timedelta(days=1)).isoformat()},
                {"start": half.isoformat(), "end": window.end.isoformat()},
            ],
        },
        "seed": spec.seed,
        "min_score": 1,
        "drop_deleted": True,
    }
    config = root / "config.json"
    config.write_text(json.dumps(config_payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    return SynthPaths(
        root=root,
        config=config,
        corpus=corpus,
        price_dir=price_dir,
        ticker_table=ticker_table,
        etf_list=etf_list,
        ticker_stopwords=ticker_stopwords,
        text_stopwords=text_stopwords,
        output_dir=output_dir,
    )
