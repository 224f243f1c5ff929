"""The compiled kernel and the pure-Python kernel must agree everywhere."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cashtags import _kernel_py

try:
    from cashtags import _kernel
except ImportError:
    _kernel = None

pytestmark = pytest.mark.skipif(_kernel is None, reason="compiled kernel not built")

KNOWN = frozenset({"GME", "AAPL", "MSFT", "GM", "F", "BB"})
STOP = frozenset({"GDP", "CAC", "GM"})
KEYWORDS = {
    "buy": 0, "buys": 0, "buying": 0, "bought": 0,
    "hold": 1, "holds": 1, "holding": 1, "held": 1,
    "sell": 2, "sells": 2, "selling": 2, "sold": 2,
    "call": 3, "calls": 3, "put": 4, "puts": 4,
}

texts = st.text(max_size=400)
spiky_texts = st.text(
    alphabet=st.sampled_from(list("ABGMEF$ .,;:!?()[]{}\"'\t\n  buysel10")), max_size=200
)


@given(texts)
@settings(max_examples=300)
def test_tokenize_agrees_on_arbitrary_text(text):
    assert _kernel.tokenize(text) == _kernel_py.tokenize(text)


@given(spiky_texts)
@settings(max_examples=300)
def test_tokenize_agrees_on_adversarial_alphabet(text):
    assert _kernel.tokenize(text) == _kernel_py.tokenize(text)


@given(texts)
@settings(max_examples=300)
def test_scan_agrees_on_arbitrary_text(text):
    compiled = _kernel.scan(text, KNOWN, STOP, KEYWORDS, 5)
    pure = _kernel_py.scan(text, KNOWN, STOP, KEYWORDS, 5)
    assert compiled == pure


@given(spiky_texts)
@settings(max_examples=500)
def test_scan_agrees_on_adversarial_alphabet(text):
    compiled = _kernel.scan(text, KNOWN, STOP, KEYWORDS, 5)
    pure = _kernel_py.scan(text, KNOWN, STOP, KEYWORDS, 5)
    assert compiled == pure


@given(texts)
@settings(max_examples=100)
def test_scan_without_keywords(text):
    assert _kernel.scan(text, KNOWN, STOP, {}, 0) == _kernel_py.scan(text, KNOWN, STOP, {}, 0)


def test_constants_match():
    assert _kernel.EDGE_PUNCTUATION == _kernel_py.EDGE_PUNCTUATION
    assert _kernel.IMPLEMENTATION == "cython"
    assert _kernel_py.IMPLEMENTATION == "python"
