"""Label normalization and the two tokenizers used across the package.

Two tokenizations coexist on purpose:

* ``tokenize`` splits running text into word tokens (maximal runs of word
  characters, combining marks attached) and single-character punctuation
  tokens.  Gazetteer matches may only start and end on these boundaries.
* ``word_split`` is the coarse, lowercasing split used when aligning
  alternative labels: whitespace and commas separate tokens, any other
  punctuation stays inside the token, so ``"(finding)"`` survives whole.
"""

from __future__ import annotations

import re
import unicodedata
from typing import Iterator, NamedTuple

# Labels of at most this many characters keep their case (acronyms).
CASE_SENSITIVE_MAX_LEN = 3

TOKEN_RE = re.compile(r"(?:\w|[\u0300-\u036f])+|[^\w\s]")
_WS_RE = re.compile(r"\s+")
_WORD_SPLIT_RE = re.compile(r"[^\s,]+")


class Token(NamedTuple):
    start: int
    end: int
    text: str


def tokenize(text: str) -> list[Token]:
    return [Token(m.start(), m.end(), m.group()) for m in TOKEN_RE.finditer(text)]


def iter_word_tokens(text: str) -> Iterator[Token]:
    """Word tokens only; punctuation tokens are skipped."""
    for m in TOKEN_RE.finditer(text):
        tok = m.group()
        if tok[0].isalnum() or tok[0] == "_":
            yield Token(m.start(), m.end(), tok)


def collapse(label: str) -> str:
    """NFC-normalize, strip, and squeeze internal whitespace to one space."""
    return _WS_RE.sub(" ", unicodedata.normalize("NFC", label)).strip()


def normalize_label(label: str) -> str:
    """Canonical gazetteer key for a label or a matched span of text.

    Whitespace is collapsed; labels longer than three characters are
    lowercased, shorter ones keep their case so "OD" does not match "od".
    """
    s = collapse(label)
    if len(s) > CASE_SENSITIVE_MAX_LEN:
        s = s.lower()
    return s


def word_split(label: str) -> list[str]:
    return [w.lower() for w in _WORD_SPLIT_RE.findall(unicodedata.normalize("NFC", label))]


def word_spans(label: str) -> list[tuple[int, int]]:
    return [m.span() for m in _WORD_SPLIT_RE.finditer(label)]
