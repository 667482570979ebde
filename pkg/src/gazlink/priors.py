"""Context-free disambiguation evidence.

Three priors are computed offline and stored side by side:

* concept frequency, P(concept), from a gold-annotated corpus;
* link probability, P(concept | label), from the same corpus;
* a static PageRank over a concept co-occurrence graph.
"""

from __future__ import annotations

import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .text import normalize_label

log = logging.getLogger(__name__)


class PriorsError(ValueError):
    pass


@dataclass(frozen=True)
class PriorStore:
    concept_freq: Mapping[str, float] = field(default_factory=dict)
    link_prob: Mapping[tuple[str, str], float] = field(default_factory=dict)
    pagerank: Mapping[str, float] = field(default_factory=dict)

    def scores_for(self, label: str, cui: str) -> dict[str, float]:
        return {
            "link_prob": self.link_prob.get((label, cui), 0.0),
            "corpus_freq": self.concept_freq.get(cui, 0.0),
            "pagerank": self.pagerank.get(cui, 0.0),
        }

    def dumps(self) -> dict[str, str]:
        """File name -> sorted TSV text."""
        return {
            "concept_freq.tsv": _tsv_text((c, p) for c, p in self.concept_freq.items()),
            "link_prob.tsv": _tsv_text((l, c, p) for (l, c), p in self.link_prob.items()),
            "pagerank.tsv": _tsv_text((c, p) for c, p in self.pagerank.items()),
        }

    def save(self, directory) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for name, content in self.dumps().items():
            with open(d / name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(content)

    @classmethod
    def load(cls, directory) -> "PriorStore":
        d = Path(directory)
        freq = {r[0]: float(r[1]) for r in _read_tsv(d / "concept_freq.tsv", 2)}
        link = {(r[0], r[1]): float(r[2]) for r in _read_tsv(d / "link_prob.tsv", 3)}
        pr = {r[0]: float(r[1]) for r in _read_tsv(d / "pagerank.tsv", 2)}
        return cls(freq, link, pr)


def _tsv_text(rows: Iterable[tuple]) -> str:
    return "".join(sorted("\t".join(x if isinstance(x, str) else repr(float(x)) for x in row) + "\n" for row in rows))


def _read_tsv(path: Path, ncols: int) -> list[list[str]]:
    if not path.exists():
        return []
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            row = line.split("\t")
            if len(row) != ncols:
                raise PriorsError(f"{path}:{lineno}: expected {ncols} columns")
            rows.append(row)
    return rows


def corpus_priors(
    mentions: Iterable[tuple[str, Sequence[str]]],
    smoothing: float = 0.0,
) -> tuple[dict[str, float], dict[tuple[str, str], float]]:
    """Concept frequencies and link probabilities from gold mentions.

    ``mentions`` yields ``(surface text, cuis)``. A gold mention listing
    several valid concepts splits its unit of mass evenly between them.
    ``smoothing`` adds k to every count over the concepts seen in the
    corpus (per label, over the concepts seen with that label).
    """
    concept_counts: Counter[str] = Counter()
    label_counts: dict[str, Counter[str]] = defaultdict(Counter)
    n = 0
    for text, cuis in mentions:
        cuis = sorted(set(cuis))
        if not cuis:
            raise PriorsError(f"mention {text!r} has no concepts")
        share = 1.0 / len(cuis)
        label = normalize_label(text)
        for c in cuis:
            concept_counts[c] += share
            label_counts[label][c] += share
        n += 1
    if n == 0:
        raise PriorsError("corpus has no gold annotations")

    k = smoothing
    total = sum(concept_counts.values()) + k * len(concept_counts)
    concept_freq = {c: (v + k) / total for c, v in concept_counts.items()}
    link_prob = {}
    for label, counts in label_counts.items():
        denom = sum(counts.values()) + k * len(counts)
        for c, v in counts.items():
            link_prob[(label, c)] = (v + k) / denom
    return concept_freq, link_prob


@dataclass(frozen=True)
class CoocRow:
    cui1: str
    cui2: str
    count: int
    year: int


@dataclass(frozen=True)
class CoocGraph:
    """Undirected weighted co-occurrence graph keyed by sorted cui pairs."""

    edges: Mapping[tuple[str, str], tuple[int, int]] = field(default_factory=dict)

    def nodes(self) -> list[str]:
        return sorted({c for pair in self.edges for c in pair})

    def rows(self) -> list[CoocRow]:
        return [CoocRow(a, b, n, y) for (a, b), (n, y) in sorted(self.edges.items())]

    def __len__(self) -> int:
        return len(self.edges)


def read_cooc(path) -> list[CoocRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise PriorsError(f"{path}:{lineno}: expected 4 tab-separated columns")
            try:
                rows.append(CoocRow(parts[0], parts[1], int(parts[2]), int(parts[3])))
            except ValueError:
                raise PriorsError(f"{path}:{lineno}: count and year must be integers") from None
    return rows


def filter_cooc(rows: Iterable[CoocRow], min_count: int = 2, since_year: int = 2000) -> CoocGraph:
    """Keep rows with ``count >= min_count`` and ``year >= since_year``.

    Filtering is per row. Surviving rows for the same unordered pair are
    merged by summing counts and keeping the latest year.
    """
    if min_count < 1:
        raise PriorsError("min_count must be >= 1")
    edges: dict[tuple[str, str], tuple[int, int]] = {}
    for r in rows:
        if r.cui1 == r.cui2 or r.count < min_count or r.year < since_year:
            continue
        key = (r.cui1, r.cui2) if r.cui1 < r.cui2 else (r.cui2, r.cui1)
        if key in edges:
            n, y = edges[key]
            edges[key] = (n + r.count, max(y, r.year))
        else:
            edges[key] = (r.count, r.year)
    return CoocGraph(edges)


@dataclass(frozen=True)
class PageRankResult:
    scores: dict[str, float]
    iterations: int
    converged: bool


def pagerank(graph: CoocGraph, damping: float = 0.85, tol: float = 1e-8, max_iter: int = 100) -> PageRankResult:
    """Power iteration on the weighted undirected graph.

    Each node spreads its mass to neighbours in proportion to edge
    counts; every node has at least one edge, so there are no dangling
    nodes. Stops when the L1 change drops below ``tol``.
    """
    if not 0.0 < damping < 1.0:
        raise PriorsError("damping must lie in (0, 1)")
    if tol <= 0 or max_iter < 1:
        raise PriorsError("tol must be > 0 and max_iter >= 1")
    nodes = graph.nodes()
    if not nodes:
        raise PriorsError("cannot rank an empty graph")
    index = {c: i for i, c in enumerate(nodes)}
    n = len(nodes)

    rows, cols, w = [], [], []
    for (a, b), (count, _) in graph.edges.items():
        i, j = index[a], index[b]
        rows += [i, j]
        cols += [j, i]
        w += [count, count]
    adj = sp.csr_matrix((np.asarray(w, dtype=float), (rows, cols)), shape=(n, n))
    strength = np.asarray(adj.sum(axis=1)).ravel()
    # column-stochastic transition: mass at j goes to i with weight w_ij / s_j
    trans = (adj @ sp.diags(1.0 / strength)).tocsr()

    x = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        nxt = teleport + damping * (trans @ x)
        nxt /= nxt.sum()
        delta = np.abs(nxt - x).sum()
        x = nxt
        if delta < tol:
            converged = True
            break
    if not converged:
        log.warning("pagerank did not converge in %d iterations", max_iter)
    return PageRankResult({c: float(x[i]) for c, i in index.items()}, it, converged)


def check_distribution(values: Iterable[float], tol: float = 1e-9) -> bool:
    vals = list(values)
    return all(0.0 <= v <= 1.0 for v in vals) and math.isclose(math.fsum(vals), 1.0, abs_tol=tol)
