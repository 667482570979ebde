"""Aho-Corasick gazetteer matcher over token symbols.

Patterns and text are both cut by ``text.tokenize``; a match therefore
always starts and ends on token boundaries. Each token after the first
carries a marker for whether whitespace precedes it, so "neoplasm,
pancreas" and "neoplasm ,pancreas" are different patterns while runs of
whitespace are interchangeable. At the root the marker is ignored: a
pattern may begin after any gap.

Tokens are lowercased for the walk. Keys of three characters or fewer
are case-sensitive, so terminals remember which exact spellings end
there and short hits are checked against the original text.
"""

from __future__ import annotations

import bisect
import unicodedata
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .text import CASE_SENSITIVE_MAX_LEN, TOKEN_RE, collapse

GAP = " "


@dataclass
class _Terminal:
    ntok: int
    long_key: str | None = None
    short_keys: frozenset[str] = frozenset()


def key_symbols(key: str) -> list[str]:
    syms = []
    prev_end = None
    for m in TOKEN_RE.finditer(key):
        tok = m.group().lower()
        if prev_end is not None and m.start() != prev_end:
            tok = GAP + tok
        syms.append(tok)
        prev_end = m.end()
    return syms


def resolve_overlaps(matches: Iterable[tuple[int, int, str]]) -> list[tuple[int, int, str]]:
    """Keep the longest matches first, leftmost among equal lengths,
    dropping anything that overlaps an already kept span."""
    ordered = sorted(set(matches))
    if all(a[1] <= b[0] for a, b in zip(ordered, ordered[1:])):
        return ordered
    kept: list[tuple[int, int, str]] = []
    taken: list[tuple[int, int]] = []
    for start, end, key in sorted(ordered, key=lambda m: (m[0] - m[1], m[0])):
        i = bisect.bisect_left(taken, (start, end))
        if i > 0 and taken[i - 1][1] > start:
            continue
        if i < len(taken) and taken[i][0] < end:
            continue
        taken.insert(i, (start, end))
        kept.append((start, end, key))
    kept.sort()
    return kept


class TokenAutomaton:
    """Usage::

        ac = TokenAutomaton(["pancreatic cancer", "cancer"])
        ac.resolve("Pancreatic cancer.")   # [(0, 17, 'pancreatic cancer')]
    """

    def __init__(self, keys: Iterable[str] = ()):
        self._goto: list[dict[str, int]] = [{}]
        self._fail: list[int] = [0]
        self._term: list[_Terminal | None] = [None]
        self._out: list[tuple[_Terminal, ...]] = [()]
        self._keys: set[str] = set()
        for k in keys:
            self._add(k)
        self._build()

    @property
    def pattern_count(self) -> int:
        return len(self._keys)

    def __contains__(self, key) -> bool:
        return key in self._keys

    def _add(self, key: str) -> None:
        syms = key_symbols(key)
        if not syms or key in self._keys:
            return
        self._keys.add(key)
        node = 0
        for s in syms:
            nxt = self._goto[node].get(s)
            if nxt is None:
                nxt = len(self._goto)
                self._goto.append({})
                self._fail.append(0)
                self._term.append(None)
                self._out.append(())
                self._goto[node][s] = nxt
            node = nxt
        term = self._term[node] or _Terminal(len(syms))
        if len(key) > CASE_SENSITIVE_MAX_LEN:
            term.long_key = key
        else:
            term.short_keys = term.short_keys | {key}
        self._term[node] = term

    def _step(self, node: int, sym: str) -> int:
        goto, fail = self._goto, self._fail
        while node:
            nxt = goto[node].get(sym)
            if nxt is not None:
                return nxt
            node = fail[node]
        return goto[0].get(sym.lstrip(GAP), 0)

    def _build(self) -> None:
        queue = deque()
        for child in self._goto[0].values():
            self._fail[child] = 0
            queue.append(child)
        while queue:
            node = queue.popleft()
            t = self._term[node]
            self._out[node] = ((t,) if t else ()) + self._out[self._fail[node]]
            for sym, child in self._goto[node].items():
                self._fail[child] = self._step(self._fail[node], sym)
                queue.append(child)

    def scan(self, text: str) -> list[tuple[int, int, str]]:
        """Every pattern occurrence in ``text``, overlaps included."""
        goto, fail, out = self._goto, self._fail, self._out
        root_get = goto[0].get
        lowered = text.lower()
        fast = text.isascii()
        # ASCII lowercasing keeps offsets and word-character classes intact
        source = lowered if fast else text
        starts: list[int] = []
        add_start = starts.append
        found = []
        node = 0
        for m in TOKEN_RE.finditer(source):
            tok = m.group()
            st = m.start()
            add_start(st)
            if not fast:
                tok = unicodedata.normalize("NFC", tok.lower())
            if node == 0:
                node = root_get(tok, 0)
            else:
                # tokens tile the non-space text, so a gap is a preceding space
                sym = GAP + tok if source[st - 1].isspace() else tok
                while True:
                    nxt = goto[node].get(sym)
                    if nxt is not None:
                        node = nxt
                        break
                    node = fail[node]
                    if node == 0:
                        node = root_get(tok, 0)
                        break
            if out[node]:
                en = m.end()
                last = len(starts) - 1
                for term in out[node]:
                    s = starts[last - term.ntok + 1]
                    if term.long_key is not None:
                        found.append((s, en, term.long_key))
                    if term.short_keys:
                        exact = collapse(text[s:en])
                        if exact in term.short_keys:
                            found.append((s, en, exact))
        return found

    def resolve(self, text: str) -> list[tuple[int, int, str]]:
        """Non-overlapping matches under longest-then-leftmost resolution."""
        return resolve_overlaps(self.scan(text))
