"""Archived-submission ingestion, filtering and corpus statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping

from . import kernel
from .dates import DateRange, is_weekend, utc_date
from .errors import JsonLinesError, RecordRejectedError

DELETION_SENTINELS = frozenset({"[deleted]", "[removed]"})
DELETED_AUTHOR = "[deleted]"


@dataclass(frozen=True)
class Submission:
    """One archived forum post. ``selftext`` keeps the raw archive value, so
    absent (None), empty and the deletion sentinels stay distinguishable."""

    id: str
    created_utc: int
    title: str
    selftext: str | None = None
    score: int = 0
    flair: str | None = None
    author: str | None = None
    num_comments: int = 0

    @property
    def created_date(self) -> date:
        return utc_date(self.created_utc)

    @property
    def body(self) -> str | None:
        """Body text when present and not a deletion sentinel, else None."""
        if self.selftext and self.selftext not in DELETION_SENTINELS:
            return self.selftext
        return None

    @property
    def is_deleted(self) -> bool:
        if self.selftext in DELETION_SENTINELS:
            return True
        return self.author == DELETED_AUTHOR


@dataclass(frozen=True)
class Corpus:
    """Submissions sorted ascending by (created_utc, id) within ``range``."""

    submissions: tuple[Submission, ...]
    range: DateRange

    def __len__(self) -> int:
        return len(self.submissions)

    def __iter__(self) -> Iterator[Submission]:
        return iter(self.submissions)


@dataclass(frozen=True)
class CorpusStats:
    """Word/character/vocabulary statistics for one kind of text."""

    text_count: int
    word_count_incl_sw: int
    word_count_excl_sw: int
    char_count_incl_sw: int
    char_count_excl_sw: int
    avg_text_length_incl_sw: float
    avg_text_length_excl_sw: float
    vocabulary_size: int


@dataclass(frozen=True)
class EngagementProfile:
    """Flair share among tagged posts plus 24-bin UTC hourly activity."""

    flair_ratios: dict[str, float]
    tagged_count: int
    untagged_count: int
    weekday_hours: tuple[int, ...]
    weekend_hours: tuple[int, ...]


def parse_submission_record(record: Mapping) -> Submission:
    """Map one archive JSON object onto a :class:`Submission`.

    Requires id, created_utc and a non-blank title; unknown fields are
    ignored and missing optional fields stay absent. Raises
    :class:`RecordRejectedError` otherwise.
    """
    record_id = record.get("id")
    record_id = str(record_id) if record_id is not None else None

    def reject(reason: str) -> RecordRejectedError:
        return RecordRejectedError(f"record rejected: {reason}", record_id=record_id)

    if record_id is None:
        raise reject("missing id")
    created = record.get("created_utc")
    if created is None:
        raise reject("missing created_utc")
    try:
        created = int(created)
    except (TypeError, ValueError):
        raise reject(f"bad created_utc {created!r}") from None
    if created <= 0:
        raise reject(f"non-positive created_utc {created}")
    title = record.get("title")
    if not isinstance(title, str) or not title.strip():
        raise reject("missing or blank title")

    selftext = record.get("selftext")
    if selftext is not None and not isinstance(selftext, str):
        selftext = str(selftext)
    flair = record.get("flair")
    if flair is None:
        flair = record.get("link_flair_text")
    if isinstance(flair, str):
        flair = flair.strip() or None
    else:
        flair = None
    author = record.get("author")
    author = str(author) if author is not None else None

    def as_int(field: str, floor: int | None = None) -> int:
        value = record.get(field)
        if value is None:
            return 0
        try:
            value = int(value)
        except (TypeError, ValueError):
            return 0
        return value if floor is None else max(floor, value)

    return Submission(
        id=record_id,
        created_utc=created,
        title=title,
        selftext=selftext,
        score=as_int("score"),
        flair=flair,
        author=author,
        num_comments=as_int("num_comments", floor=0),
    )


def iter_submission_records(
    path: Path,
    *,
    skip_invalid: bool = False,
    on_skip: Callable[[RecordRejectedError], None] | None = None,
) -> Iterator[Submission]:
    """Parse a JSON-lines archive file, one submission object per line.

    Malformed JSON raises :class:`JsonLinesError` with the byte offset of the
    failure. Rejected records raise unless ``skip_invalid`` is set, in which
    case ``on_skip`` (if given) observes each rejection.
    """
    path = Path(path)
    offset = 0
    with path.open("rb") as handle:
        for raw_line in handle:
            line = raw_line.decode("utf-8", errors="replace").strip()
            if line:
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    byte_at = offset + len(line[: exc.pos].encode("utf-8"))
                    raise JsonLinesError(exc.msg, str(path), byte_at) from exc
                try:
                    yield parse_submission_record(record)
                except RecordRejectedError as exc:
                    if not skip_invalid:
                        raise
                    if on_skip is not None:
                        on_skip(exc)
            offset += len(raw_line)


def filter_corpus(
    records: Iterable[Submission],
    min_score: int,
    drop_deleted: bool,
    date_range: DateRange,
) -> Corpus:
    """Apply the ingestion criteria: score threshold, optional removal of
    deleted posts, date window. Output is sorted by (created_utc, id), which
    makes re-ingestion (and re-filtering) deterministic and idempotent."""
    kept = [
        s
        for s in records
        if s.score >= min_score
        and s.created_date in date_range
        and not (drop_deleted and s.is_deleted)
    ]
    kept.sort(key=lambda s: (s.created_utc, s.id))
    return Corpus(submissions=tuple(kept), range=date_range)


def load_stopwords(path: Path) -> frozenset[str]:
    """Plain-text stop-word list: one lowercase word per line, '#' comments."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def _text_stats(texts: Iterable[str], stopwords: frozenset[str]) -> CorpusStats:
    text_count = 0
    words_incl = words_excl = chars_incl = chars_excl = 0
    vocabulary: set[str] = set()
    for text in texts:
        text_count += 1
        for token in kernel.tokenize(text):
            words_incl += 1
            chars_incl += len(token)
            lowered = token.lower()
            if lowered in stopwords:
                continue
            words_excl += 1
            chars_excl += len(token)
            vocabulary.add(lowered)
    return CorpusStats(
        text_count=text_count,
        word_count_incl_sw=words_incl,
        word_count_excl_sw=words_excl,
        char_count_incl_sw=chars_incl,
        char_count_excl_sw=chars_excl,
        avg_text_length_incl_sw=words_incl / text_count if text_count else 0.0,
        avg_text_length_excl_sw=words_excl / text_count if text_count else 0.0,
        vocabulary_size=len(vocabulary),
    )


def corpus_stats(corpus: Corpus, stopwords: frozenset[str]) -> tuple[CorpusStats, CorpusStats]:
    """Statistics over titles and over present body texts.

    Tokens are whitespace-split with edge punctuation stripped; counts with
    and without stop words, plus the lowercased vocabulary size. Character
    counts sum token lengths so the excluding-stop-words variant is
    well defined.
    """
    titles = _text_stats((s.title for s in corpus), stopwords)
    bodies = _text_stats((s.body for s in corpus if s.body is not None), stopwords)
    return titles, bodies


def engagement_profile(corpus: Corpus) -> EngagementProfile:
    """Flair distribution over tagged posts and hourly histograms, split by
    UTC weekday vs weekend."""
    flair_counts: dict[str, int] = {}
    untagged = 0
    weekday = [0] * 24
    weekend = [0] * 24
    for s in corpus:
        if s.flair:
            flair_counts[s.flair] = flair_counts.get(s.flair, 0) + 1
        else:
            untagged += 1
        moment = s.created_utc
        hour = (moment // 3600) % 24
        bins = weekend if is_weekend(s.created_date) else weekday
        bins[hour] += 1
    tagged = sum(flair_counts.values())
    ratios = {
        flair: count / tagged for flair, count in sorted(flair_counts.items())
    }
    return EngagementProfile(
        flair_ratios=ratios,
        tagged_count=tagged,
        untagged_count=untagged,
        weekday_hours=tuple(weekday),
        weekend_hours=tuple(weekend),
    )


def submission_to_record(s: Submission) -> dict:
    """Canonical JSON object for re-export; omits absent optional fields."""
    record: dict = {"id": s.id, "created_utc": s.created_utc, "title": s.title, "score": s.score}
    if s.selftext is not None:
        record["selftext"] = s.selftext
    if s.flair is not None:
        record["flair"] = s.flair
    if s.author is not None:
        record["author"] = s.author
    if s.num_comments:
        record["num_comments"] = s.num_comments
    return record


def write_corpus_jsonl(corpus: Corpus, path: Path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for s in corpus:
            handle.write(json.dumps(submission_to_record(s), sort_keys=True))
            handle.write("\n")


def read_corpus_jsonl(path: Path, date_range: DateRange) -> Corpus:
    """Read back a corpus written by :func:`write_corpus_jsonl`."""
    return filter_corpus(
        iter_submission_records(path),
        min_score=-(10**9),
        drop_deleted=False,
        date_range=date_range,
    )
