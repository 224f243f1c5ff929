# cython: language_level=3
"""Compiled text-scanning kernel; semantics match cashtags._kernel_py exactly."""

from cpython.unicode cimport Py_UNICODE_ISSPACE

IMPLEMENTATION = "cython"

EDGE_PUNCTUATION = ".,;:!?()[]{}\"'"


cdef inline bint _is_edge_punct(Py_UCS4 ch) noexcept:
    return (
        ch == u"." or ch == u"," or ch == u";" or ch == u":"
        or ch == u"!" or ch == u"?" or ch == u"(" or ch == u")"
        or ch == u"[" or ch == u"]" or ch == u"{" or ch == u"}"
        or ch == u'"' or ch == u"'"
    )


cdef inline bint _is_upper_alpha(Py_UCS4 ch) noexcept:
    return u"A" <= ch <= u"Z"


cdef inline Py_ssize_t _next_token(str text, Py_ssize_t n, Py_ssize_t i,
                                   Py_ssize_t *start, Py_ssize_t *end) noexcept:
    """Advance past whitespace, locate the next raw token, strip its edges.

    Returns the scan position after the raw token; *start == *end means the
    token was pure punctuation and must be skipped.
    """
    cdef Py_ssize_t s, e
    while i < n and Py_UNICODE_ISSPACE(<Py_UCS4>text[i]):
        i += 1
    s = i
    while i < n and not Py_UNICODE_ISSPACE(<Py_UCS4>text[i]):
        i += 1
    e = i
    while s < e and _is_edge_punct(<Py_UCS4>text[s]):
        s += 1
    while e > s and _is_edge_punct(<Py_UCS4>text[e - 1]):
        e -= 1
    start[0] = s
    end[0] = e
    return i


def tokenize(str text):
    """Whitespace-split ``text`` and strip edge punctuation; drops empty tokens."""
    cdef list tokens = []
    cdef Py_ssize_t i = 0, n = len(text), start = 0, end = 0
    while i < n:
        i = _next_token(text, n, i, &start, &end)
        if end > start:
            tokens.append(text[start:end])
    return tokens


def scan(str text, frozenset known, frozenset stop, dict keyword_groups,
         Py_ssize_t n_groups):
    """Single pass over ``text``: ticker mentions plus keyword-group counts."""
    cdef list mentions = []
    cdef list counts = [0] * n_groups
    cdef Py_ssize_t i = 0, n = len(text), start = 0, end = 0
    cdef Py_ssize_t j, length, index = 0, max_kw = 0
    cdef bint ok
    cdef str token
    cdef object group, word
    for word in keyword_groups:
        if len(<str>word) > max_kw:
            max_kw = len(<str>word)
    while i < n:
        i = _next_token(text, n, i, &start, &end)
        if end <= start:
            continue
        length = end - start
        if <Py_UCS4>text[start] == u"$":
            if 2 <= length <= 6:
                ok = True
                for j in range(start + 1, end):
                    if not _is_upper_alpha(<Py_UCS4>text[j]):
                        ok = False
                        break
                if ok:
                    mentions.append((text[start + 1:end], True, index))
        elif 2 <= length <= 5:
            ok = True
            for j in range(start, end):
                if not _is_upper_alpha(<Py_UCS4>text[j]):
                    ok = False
                    break
            if ok:
                token = text[start:end]
                if token in known and token not in stop:
                    mentions.append((token, False, index))
        if length <= max_kw:
            group = keyword_groups.get(text[start:end].lower())
            if group is not None:
                counts[<Py_ssize_t>group] += 1
        index += 1
    return mentions, counts
