"""Mine stock-ticker mentions and trade signals from archived forum
submissions, join them with daily market data and backtest the resulting
advice against baseline strategies."""

from .archive import ArchiveClientConfig, crawl_archive
from .backtest import (
    EvaluationReport,
    StrategyKind,
    StrategySpec,
    equally_distributed_days,
    evaluate_strategy,
    ma_filter,
    random_days,
    restrict_range,
    sector_distribution,
    select_portfolio,
)
from .corpus import (
    Corpus,
    CorpusStats,
    Submission,
    corpus_stats,
    engagement_profile,
    filter_corpus,
    parse_submission_record,
)
from .dates import DateRange
from .lexer import (
    KeywordTable,
    TickerLexicon,
    TickerMention,
    TransactionCounts,
    count_transaction_words,
    detect_tickers,
    load_lexicon,
    tokenize,
)
from .market import (
    PriceBar,
    PriceSeries,
    WindowConfig,
    calendar_fill,
    compute_relative_volatility,
    compute_window_features,
    load_price_series,
)
from .pipeline import PipelineConfig, load_config, run_pipeline
from .reports import render_report
from .signals import (
    DailySummary,
    Signal,
    SignalClass,
    aggregate_daily,
    classify_buy_signal,
    derive_daily_signal,
    derive_flags,
    join_market,
)

__version__ = "0.1.0"
