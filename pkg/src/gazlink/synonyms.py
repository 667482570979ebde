"""Data-driven word synonyms harvested from alternative concept labels.

Every pair of labels belonging to the same concept is aligned word by
word. Near-identical words (small length-normalised edit distance) are
paired first; whatever is left over on each side is paired positionally,
and a single leftover word with nothing opposite pairs with the empty
string, marking it as deletable. Pair counts are accumulated across the
knowledge base with each concept's contribution scaled down by its number
of label pairs, then thresholded and hand-edited.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .kb import KnowledgeBase
from .text import word_split

Pair = tuple[str, str]

DEFAULT_THRESHOLD = 12.0
DEFAULT_EMPTY_THRESHOLD = 1000.0


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_levenshtein(a: str, b: str) -> float:
    """Edit distance divided by the longer length; 0.0 iff ``a == b``."""
    return levenshtein(a, b) / max(len(a), len(b), 1)


@dataclass(frozen=True)
class AlignmentConfig:
    max_normalized_distance: float = 0.34
    min_word_length: int = 4

    def __post_init__(self):
        if not 0.0 <= self.max_normalized_distance <= 1.0:
            raise ValueError("max_normalized_distance must lie in [0, 1]")
        if self.min_word_length < 1:
            raise ValueError("min_word_length must be >= 1")


@dataclass(frozen=True)
class SynonymPair:
    source: str
    target: str
    score: float

    def __post_init__(self):
        if not self.source:
            raise ValueError("synonym source must be non-empty")
        if self.source == self.target:
            raise ValueError(f"degenerate synonym pair {self.source!r}")
        if not self.score >= 0:
            raise ValueError(f"negative score for {self.source!r}")

    @property
    def key(self) -> Pair:
        return (self.source, self.target)


@dataclass(frozen=True)
class OverrideList:
    """Manual edits: ``blocked`` pairs are removed in both directions,
    ``forced`` pairs are always kept."""

    blocked: frozenset[Pair] = frozenset()
    forced: tuple[SynonymPair, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "blocked", frozenset(self.blocked))
        object.__setattr__(self, "forced", tuple(self.forced))
        for p in self.forced:
            if self.is_blocked(p.key):
                raise ValueError(f"pair {p.key} is both blocked and forced")

    def is_blocked(self, pair: Pair) -> bool:
        return pair in self.blocked or (bool(pair[1]) and (pair[1], pair[0]) in self.blocked)


@dataclass(frozen=True)
class SynonymTable:
    pairs: Mapping[Pair, float] = field(default_factory=dict)
    threshold: float = DEFAULT_THRESHOLD
    empty_threshold: float = DEFAULT_EMPTY_THRESHOLD

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def threshold_for(self, pair: Pair) -> float:
        return self.empty_threshold if pair[1] == "" else self.threshold

    def by_source(self) -> dict[str, list[str]]:
        """Replacement targets per source word, sorted for determinism."""
        out: dict[str, list[str]] = defaultdict(list)
        for src, tgt in sorted(self.pairs):
            out[src].append(tgt)
        return dict(out)

    def entries(self) -> list[SynonymPair]:
        return [SynonymPair(s, t, v) for (s, t), v in sorted(self.pairs.items())]


def align_label_pair(label_a: str, label_b: str, cfg: AlignmentConfig = AlignmentConfig()) -> list[Pair]:
    """Word pairs suggested by two labels of the same concept.

    >>> align_label_pair("pancreatic cancer", "neoplasm, pancreas")
    [('pancreatic', 'pancreas'), ('cancer', 'neoplasm')]
    """
    wa, wb = word_split(label_a), word_split(label_b)
    scored = []
    for i, x in enumerate(wa):
        for j, y in enumerate(wb):
            if x == y:
                scored.append((0.0, i, j))
            elif len(x) >= cfg.min_word_length and len(y) >= cfg.min_word_length:
                d = normalized_levenshtein(x, y)
                if d <= cfg.max_normalized_distance:
                    scored.append((d, i, j))
    scored.sort()

    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs: list[Pair] = []
    for _, i, j in scored:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        if wa[i] != wb[j]:
            pairs.append((wa[i], wb[j]))

    rest_a = [w for i, w in enumerate(wa) if i not in used_a]
    rest_b = [w for j, w in enumerate(wb) if j not in used_b]
    if len(rest_a) > 2 or len(rest_b) > 2:
        return pairs
    if not rest_a or not rest_b:
        # a lone leftover word is deletable; two words would be a multi-word deletion
        lone = rest_a or rest_b
        if len(lone) == 1:
            pairs.append((lone[0], ""))
        return pairs
    for x, y in zip(rest_a, rest_b):
        if x != y:
            pairs.append((x, y))
    if len(rest_a) != len(rest_b):
        longer = rest_a if len(rest_a) > len(rest_b) else rest_b
        pairs.append((longer[-1], ""))
    return pairs


def derive_synonyms(kb: KnowledgeBase, cfg: AlignmentConfig = AlignmentConfig()) -> dict[Pair, float]:
    """Raw pair scores summed over every concept of ``kb``.

    A concept with L labels has L(L-1)/2 label pairs; each pair occurrence
    contributes 2 / (L(L-1)), so a concept's total weight per harvested
    pair is at most one however many labels it has.
    """
    raw: dict[Pair, float] = defaultdict(float)
    for concept in kb:
        labels = concept.labels
        n = len(labels)
        if n < 2:
            continue
        unit = 2.0 / (n * (n - 1))
        for a, b in combinations(labels, 2):
            for src, tgt in align_label_pair(a, b, cfg):
                raw[(src, tgt)] += unit
                if tgt:
                    raw[(tgt, src)] += unit
    return dict(raw)


def finalize_table(
    raw: Mapping[Pair, float],
    threshold: float = DEFAULT_THRESHOLD,
    empty_threshold: float = DEFAULT_EMPTY_THRESHOLD,
    overrides: OverrideList = OverrideList(),
) -> SynonymTable:
    if threshold <= 0 or empty_threshold <= 0:
        raise ValueError("thresholds must be positive")
    table = SynonymTable({}, threshold, empty_threshold)
    kept = {
        pair: score
        for pair, score in raw.items()
        if score >= table.threshold_for(pair) and not overrides.is_blocked(pair)
    }
    for p in overrides.forced:
        # a forced pair is lifted to its threshold so the table invariant holds
        kept[p.key] = max(p.score, kept.get(p.key, 0.0), table.threshold_for(p.key))
    return SynonymTable(dict(sorted(kept.items())), threshold, empty_threshold)


def _rows(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if line.strip():
                yield lineno, line.split("\t")


def write_table(table: SynonymTable, path) -> None:
    lines = ["from\tto\tscore\n"]
    lines += [f"{p.source}\t{p.target}\t{p.score!r}\n" for p in table.entries()]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)


def read_table(path, threshold: float = DEFAULT_THRESHOLD, empty_threshold: float = DEFAULT_EMPTY_THRESHOLD) -> SynonymTable:
    """Load a synonym TSV as-is; thresholds are recorded, not re-applied."""
    pairs: dict[Pair, float] = {}
    for lineno, row in _rows(path):
        if lineno == 1 and row[:2] == ["from", "to"]:
            continue
        if len(row) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
        try:
            p = SynonymPair(row[0], row[1], float(row[2]))
        except ValueError as e:
            raise ValueError(f"{path}:{lineno}: {e}") from None
        pairs[p.key] = p.score
    return SynonymTable(pairs, threshold, empty_threshold)


def read_overrides(path) -> OverrideList:
    """Override TSV: ``action  from  to  [score]`` with action block|force."""
    blocked: set[Pair] = set()
    forced: list[SynonymPair] = []
    for lineno, row in _rows(path):
        if row[0] == "action" or row[0].startswith("#"):
            continue
        action = row[0].strip().lower()
        if action not in ("block", "force") or len(row) < 3:
            raise ValueError(f"{path}:{lineno}: expected 'block|force<TAB>from<TAB>to[<TAB>score]'")
        pair = (row[1].lower(), row[2].lower())
        if action == "block":
            blocked.add(pair)
        else:
            score = float(row[3]) if len(row) > 3 and row[3] else 0.0
            forced.append(SynonymPair(pair[0], pair[1], score))
    return OverrideList(frozenset(blocked), tuple(forced))


def harvest_summary(raw: Mapping[Pair, float], table: SynonymTable) -> tuple[int, int]:
    """(accepted, rejected) pair counts, for reporting."""
    accepted = sum(1 for p in raw if p in table.pairs)
    return accepted, len(raw) - accepted
