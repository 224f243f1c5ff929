"""Pure-Python text-scanning kernel.

Reference implementation of the hot path; ``cashtags._kernel`` is the
compiled twin with identical semantics. Keep the two in lockstep — the
equivalence property tests compare them token by token.
"""

from __future__ import annotations

IMPLEMENTATION = "python"

# Punctuation stripped from token edges only; interior characters are kept,
# and "$" is deliberately absent so cashtags survive.
EDGE_PUNCTUATION = ".,;:!?()[]{}\"'"


def _all_upper_alpha(token: str) -> bool:
    return all("A" <= ch <= "Z" for ch in token)


def tokenize(text):
    """Whitespace-split ``text`` and strip edge punctuation; drops empty tokens."""
    tokens = []
    for raw in text.split():
        token = raw.strip(EDGE_PUNCTUATION)
        if token:
            tokens.append(token)
    return tokens


def scan(text, known, stop, keyword_groups, n_groups):
    """Single pass over ``text``: ticker mentions plus keyword-group counts.

    Returns ``(mentions, counts)`` where mentions are
    ``(symbol, dollar_prefixed, token_index)`` tuples and ``counts`` has one
    occurrence tally per keyword group. A token is a mention iff it is
    2-5 uppercase A-Z letters found in ``known`` but not ``stop``, or it is
    "$" followed by 1-5 uppercase A-Z letters (lexicon-independent).
    """
    mentions = []
    counts = [0] * n_groups
    max_kw = max(map(len, keyword_groups), default=0)
    index = 0
    for raw in text.split():
        token = raw.strip(EDGE_PUNCTUATION)
        if not token:
            continue
        if token[0] == "$":
            body = token[1:]
            if 1 <= len(body) <= 5 and _all_upper_alpha(body):
                mentions.append((body, True, index))
        elif 2 <= len(token) <= 5 and _all_upper_alpha(token):
            if token in known and token not in stop:
                mentions.append((token, False, index))
        if len(token) <= max_kw:
            group = keyword_groups.get(token.lower())
            if group is not None:
                counts[group] += 1
        index += 1
    return mentions, counts
