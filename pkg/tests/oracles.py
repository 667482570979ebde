"""Reference implementations used only by the tests.

Each one is deliberately naive and shares no code with the package, so
an agreement between the two is evidence rather than tautology.
"""

import re
import sys
import unicodedata
from functools import lru_cache

import numpy as np


def edit_distance(a: str, b: str) -> int:
    """Textbook recursive Levenshtein with memoization."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * (len(a) + len(b)) + 100))

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def normalized_edit_distance(a: str, b: str) -> float:
    return edit_distance(a, b) / max(len(a), len(b), 1)


def dense_pagerank(edges: dict, damping: float = 0.85, iters: int = 5000, tol: float = 1e-14) -> dict:
    """Power iteration on a dense row-stochastic matrix.

    ``edges`` maps unordered node pairs to positive weights.
    """
    nodes = sorted({n for pair in edges for n in pair})
    pos = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    w = np.zeros((n, n))
    for (a, b), c in edges.items():
        w[pos[a], pos[b]] += c
        w[pos[b], pos[a]] += c
    p = w / w.sum(axis=1, keepdims=True)
    r = np.full(n, 1.0 / n)
    for _ in range(iters):
        nxt = (1 - damping) / n + damping * (r @ p)
        if np.abs(nxt - r).sum() < tol:
            r = nxt
            break
        r = nxt
    return {node: r[pos[node]] for node in nodes}


_TOKEN = re.compile(r"(?:\w|[\u0300-\u036f])+|[^\w\s]")


def oracle_key(s: str) -> str:
    s = " ".join(unicodedata.normalize("NFC", s).split())
    return s.lower() if len(s) > 3 else s


def brute_force_matches(text: str, keys) -> list:
    """Every (start, end, key) where text[start:end] is a run of whole
    tokens whose normalized form is a key; then longest-leftmost
    resolution by exhaustive scan."""
    keys = set(keys)
    toks = [m.span() for m in _TOKEN.finditer(text)]
    found = []
    for i, (a, _) in enumerate(toks):
        for _, b in toks[i:]:
            k = oracle_key(text[a:b])
            if k in keys:
                found.append((a, b, k))
    kept = []
    remaining = set(found)
    while remaining:
        best = min(remaining, key=lambda m: (-(m[1] - m[0]), m[0], m[2]))
        kept.append(best)
        remaining = {m for m in remaining if m[1] <= best[0] or m[0] >= best[1]}
    return sorted(kept)
