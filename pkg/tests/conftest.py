from __future__ import annotations

from pathlib import Path

import pytest

from cashtags.lexer import TickerLexicon, load_lexicon
from cashtags.synth import SynthSpec, generate_dataset

# Symbols and stop words from the worked ticker-detection examples.
EXAMPLE_SYMBOLS = ("AAPL", "CRM", "COST", "SHOP", "NOW", "CAR", "GM", "GME", "MSFT", "F")
EXAMPLE_STOPWORDS = ("GDP", "CAC")


def write_lexicon_files(
    directory: Path,
    symbols=EXAMPLE_SYMBOLS,
    etfs=("SPY", "QQQ"),
    stopwords=EXAMPLE_STOPWORDS,
    sectors: dict[str, str] | None = None,
) -> tuple[Path, Path, Path]:
    sectors = sectors or {}
    table = directory / "tickers.csv"
    lines = ["symbol,name,sector"]
    for symbol in symbols:
        lines.append(f"{symbol},{symbol} Inc.,{sectors.get(symbol, 'Technology')}")
    table.write_text("\n".join(lines) + "\n", encoding="utf-8")
    etf_path = directory / "etfs.txt"
    etf_path.write_text("\n".join(etfs) + "\n", encoding="utf-8")
    stop_path = directory / "stopwords.txt"
    stop_path.write_text("\n".join(stopwords) + "\n", encoding="utf-8")
    return table, etf_path, stop_path


@pytest.fixture
def lexicon_files(tmp_path) -> tuple[Path, Path, Path]:
    return write_lexicon_files(tmp_path)


@pytest.fixture
def paper_lexicon(lexicon_files) -> TickerLexicon:
    return load_lexicon(*lexicon_files)


ACCEPTANCE_SPEC = SynthSpec(seed=20210127, days=800, submissions=20_000)


@pytest.fixture(scope="session")
def synth_root(tmp_path_factory) -> Path:
    """The acceptance-scale synthetic dataset (5 tickers x 800 days x 20k
    submissions), generated once per session."""
    root = tmp_path_factory.mktemp("synth")
    generate_dataset(ACCEPTANCE_SPEC, root)
    return root


@pytest.fixture
def small_synth(tmp_path) -> Path:
    """A fast, small variant for pipeline mechanics tests."""
    generate_dataset(SynthSpec(seed=5, days=90, submissions=400), tmp_path)
    return tmp_path
