from __future__ import annotations

import json
import random
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cashtags.corpus import (
    Corpus,
    Submission,
    corpus_stats,
    engagement_profile,
    filter_corpus,
    iter_submission_records,
    load_stopwords,
    parse_submission_record,
    read_corpus_jsonl,
    write_corpus_jsonl,
)
from cashtags.dates import DateRange
from cashtags.errors import JsonLinesError, RecordRejectedError

import oracles

RANGE_2019 = DateRange(date(2019, 1, 1), date(2019, 12, 31))


def sub(i: int, ts: int = 1546300800, score: int = 1, **kw) -> Submission:
    return Submission(id=f"s{i}", created_utc=ts, title=kw.pop("title", f"post {i}"), score=score, **kw)


class TestParseRecord:
    def test_direct_field_mapping(self):
        record = {"id": "a1", "created_utc": 1546300800, "title": "GME to the moon", "score": 5}
        parsed = parse_submission_record(record)
        assert parsed.id == "a1"
        assert parsed.score == 5
        assert parsed.selftext is None
        assert parsed.body is None

    def test_sentinel_mapping(self):
        record = {"id": "a2", "created_utc": 1546300800, "title": "x", "selftext": "[removed]", "score": 1}
        parsed = parse_submission_record(record)
        assert parsed.selftext == "[removed]"
        assert parsed.body is None
        assert parsed.is_deleted

    def test_missing_required_field(self):
        with pytest.raises(RecordRejectedError) as err:
            parse_submission_record({"id": "a3", "title": "x"})
        assert err.value.record_id == "a3"

    def test_blank_title_rejected(self):
        with pytest.raises(RecordRejectedError):
            parse_submission_record({"id": "a4", "created_utc": 1, "title": "   "})

    def test_unknown_fields_ignored(self):
        parsed = parse_submission_record(
            {"id": "a5", "created_utc": 9, "title": "t", "upvote_ratio": 0.99, "media": {}}
        )
        assert parsed.id == "a5"

    def test_flair_fallback_field(self):
        parsed = parse_submission_record(
            {"id": "a6", "created_utc": 9, "title": "t", "link_flair_text": "DD"}
        )
        assert parsed.flair == "DD"

    def test_empty_selftext_is_present_but_not_body(self):
        parsed = parse_submission_record({"id": "a7", "created_utc": 9, "title": "t", "selftext": ""})
        assert parsed.selftext == ""
        assert parsed.body is None
        assert not parsed.is_deleted


class TestJsonLines:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"id":"a1","created_utc":1546300800,"title":"one","score":3}\n'
            '{"id":"a2","created_utc":1546300900,"title":"two","score":1}\n',
            encoding="utf-8",
        )
        records = list(iter_submission_records(path))
        assert [r.id for r in records] == ["a1", "a2"]

    def test_malformed_json_reports_byte_offset(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        good = '{"id":"a1","created_utc":1546300800,"title":"one"}\n'
        path.write_text(good + "{broken\n", encoding="utf-8")
        with pytest.raises(JsonLinesError) as err:
            list(iter_submission_records(path))
        assert err.value.byte_offset >= len(good.encode())

    def test_skip_invalid_counts(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text(
            '{"id":"a1","created_utc":1546300800,"title":"one"}\n'
            '{"id":"bad","title":"no timestamp"}\n',
            encoding="utf-8",
        )
        skipped = []
        records = list(iter_submission_records(path, skip_invalid=True, on_skip=skipped.append))
        assert len(records) == 1
        assert len(skipped) == 1


class TestFilterCorpus:
    def test_score_threshold(self):
        records = [sub(1, score=0), sub(2, score=1), sub(3, score=3)]
        corpus = filter_corpus(records, min_score=1, drop_deleted=True, date_range=RANGE_2019)
        assert len(corpus) == 2

    def test_deleted_excluded(self):
        records = [
            sub(1, selftext="[deleted]"),
            sub(2, author="[deleted]"),
            sub(3, selftext="kept body"),
        ]
        corpus = filter_corpus(records, min_score=1, drop_deleted=True, date_range=RANGE_2019)
        assert [s.id for s in corpus] == ["s3"]

    def test_deleted_kept_when_flag_off(self):
        records = [sub(1, selftext="[deleted]")]
        corpus = filter_corpus(records, min_score=1, drop_deleted=False, date_range=RANGE_2019)
        assert len(corpus) == 1

    def test_empty_input(self):
        corpus = filter_corpus([], min_score=1, drop_deleted=True, date_range=RANGE_2019)
        assert len(corpus) == 0
        assert corpus.range == RANGE_2019

    def test_range_bounds_inclusive(self):
        inside = sub(1, ts=1546300800)  # 2019-01-01
        before = sub(2, ts=1546300799)  # 2018-12-31 23:59:59
        corpus = filter_corpus([inside, before], min_score=0, drop_deleted=True, date_range=RANGE_2019)
        assert [s.id for s in corpus] == ["s1"]

    def test_sorted_with_id_tiebreak(self):
        records = [sub(2, ts=1546309000), sub(1, ts=1546309000), sub(3, ts=1546308000)]
        corpus = filter_corpus(records, min_score=0, drop_deleted=True, date_range=RANGE_2019)
        assert [s.id for s in corpus] == ["s3", "s1", "s2"]

    def test_idempotent(self):
        rng = random.Random(3)
        records = [
            sub(i, ts=1546300800 + rng.randrange(10**7), score=rng.randrange(4))
            for i in range(200)
        ]
        once = filter_corpus(records, min_score=1, drop_deleted=True, date_range=RANGE_2019)
        twice = filter_corpus(once, min_score=1, drop_deleted=True, date_range=RANGE_2019)
        assert once == twice

    def test_round_trip_jsonl(self, tmp_path):
        records = [sub(1, flair="DD", selftext="body"), sub(2, author="u")]
        corpus = filter_corpus(records, min_score=0, drop_deleted=False, date_range=RANGE_2019)
        path = tmp_path / "out.jsonl"
        write_corpus_jsonl(corpus, path)
        again = read_corpus_jsonl(path, RANGE_2019)
        assert again.submissions == corpus.submissions


class TestCorpusStats:
    def test_hand_count(self):
        corpus = filter_corpus(
            [sub(1, title="Buy the dip")], min_score=0, drop_deleted=True, date_range=RANGE_2019
        )
        titles, bodies = corpus_stats(corpus, frozenset({"the"}))
        assert titles.word_count_incl_sw == 3
        assert titles.word_count_excl_sw == 2
        assert titles.vocabulary_size == 2
        assert titles.avg_text_length_incl_sw == 3.0
        assert bodies.text_count == 0

    def test_zero_bodies(self):
        corpus = filter_corpus(
            [sub(1), sub(2, selftext=""), sub(3, selftext="[removed]")],
            min_score=0,
            drop_deleted=False,
            date_range=RANGE_2019,
        )
        _, bodies = corpus_stats(corpus, frozenset())
        assert bodies.text_count == 0
        assert bodies.word_count_incl_sw == 0
        assert bodies.avg_text_length_incl_sw == 0.0

    def test_excl_never_exceeds_incl(self):
        corpus = filter_corpus(
            [sub(i, title=f"the word {i} is the same") for i in range(20)],
            min_score=0,
            drop_deleted=True,
            date_range=RANGE_2019,
        )
        titles, _ = corpus_stats(corpus, frozenset({"the", "is"}))
        assert titles.word_count_excl_sw <= titles.word_count_incl_sw
        assert titles.char_count_excl_sw <= titles.char_count_incl_sw

    def test_thousand_title_fixture_matches_oracle(self):
        rng = random.Random(99)
        vocabulary = ["Buy", "sell", "the", "dip,", "GME!", "(hold)", "a", "🚀", "$5", "it's"]
        titles = [
            " ".join(rng.choice(vocabulary) for _ in range(rng.randint(1, 12))) for _ in range(1000)
        ]
        stopwords = frozenset({"the", "a"})
        corpus = filter_corpus(
            [sub(i, title=t) for i, t in enumerate(titles)],
            min_score=0,
            drop_deleted=True,
            date_range=RANGE_2019,
        )
        stats, _ = corpus_stats(corpus, stopwords)
        expected = oracles.word_stats_of(titles, set(stopwords))
        assert stats.text_count == expected["text_count"]
        assert stats.word_count_incl_sw == expected["word_count_incl_sw"]
        assert stats.word_count_excl_sw == expected["word_count_excl_sw"]
        assert stats.char_count_incl_sw == expected["char_count_incl_sw"]
        assert stats.char_count_excl_sw == expected["char_count_excl_sw"]
        assert stats.vocabulary_size == len(expected["vocabulary"])

    @given(st.permutations(range(8)))
    @settings(max_examples=40)
    def test_order_invariance(self, order):
        titles = ["buy GME", "sell now", "the dip", "hold the line", "a b c", "words", "more words", "x"]
        records = [sub(i, title=titles[i]) for i in order]
        corpus = filter_corpus(records, min_score=0, drop_deleted=True, date_range=RANGE_2019)
        stats, _ = corpus_stats(corpus, frozenset({"the"}))
        assert stats.word_count_incl_sw == sum(len(t.split()) for t in titles)


class TestEngagement:
    def test_hand_count(self):
        records = [
            sub(1, flair="Meme"),
            sub(2, flair="Meme"),
            sub(3, flair="DD"),
            sub(4),
        ]
        profile = engagement_profile(
            filter_corpus(records, min_score=0, drop_deleted=True, date_range=RANGE_2019)
        )
        assert profile.flair_ratios["Meme"] == pytest.approx(2 / 3)
        assert profile.flair_ratios["DD"] == pytest.approx(1 / 3)
        assert profile.untagged_count == 1

    def test_single_bin(self):
        # 2019-01-07 is a Monday; 16:00 UTC.
        monday_16 = 1546876800
        records = [sub(i, ts=monday_16) for i in range(5)]
        profile = engagement_profile(
            filter_corpus(records, min_score=0, drop_deleted=True, date_range=RANGE_2019)
        )
        assert profile.weekday_hours[16] == 5
        assert sum(profile.weekday_hours) == 5
        assert sum(profile.weekend_hours) == 0

    def test_ratios_sum_to_one(self):
        rng = random.Random(17)
        flairs = ["Meme", "DD", "News", "YOLO", None]
        records = [
            sub(i, ts=1546300800 + rng.randrange(10**7), flair=rng.choice(flairs))
            for i in range(500)
        ]
        profile = engagement_profile(
            filter_corpus(records, min_score=0, drop_deleted=True, date_range=RANGE_2019)
        )
        assert abs(sum(profile.flair_ratios.values()) - 1.0) <= 1e-9

    def test_histogram_matches_oracle_recount(self):
        rng = random.Random(4)
        timestamps = [1546300800 + rng.randrange(10**7) for _ in range(300)]
        records = [sub(i, ts=ts) for i, ts in enumerate(timestamps)]
        corpus = filter_corpus(records, min_score=0, drop_deleted=True, date_range=RANGE_2019)
        profile = engagement_profile(corpus)
        weekday = [0] * 24
        weekend = [0] * 24
        for ts in timestamps:
            day = oracles.utc_day(ts)
            hour = (ts % 86400) // 3600
            (weekend if day.weekday() >= 5 else weekday)[hour] += 1
        assert list(profile.weekday_hours) == weekday
        assert list(profile.weekend_hours) == weekend


def test_load_stopwords(tmp_path):
    path = tmp_path / "sw.txt"
    path.write_text("# comment\nthe\nA\n\nof\n", encoding="utf-8")
    assert load_stopwords(path) == frozenset({"the", "a", "of"})
