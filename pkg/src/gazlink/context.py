"""Additive word-vector context scoring.

A concept is represented by the sum of the vectors of the words in its
definition, a mention by the sum over a window of surrounding words, and
the two are compared by cosine. Off by default: it costs runtime work for
little gain over the priors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .kb import Concept
from .text import word_split

log = logging.getLogger(__name__)


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    dim: int
    index: Mapping[str, int]
    matrix: np.ndarray

    def __post_init__(self):
        if self.dim <= 0:
            raise EmbeddingError("dim must be positive")
        if self.matrix.shape != (len(self.index), self.dim):
            raise EmbeddingError("matrix shape does not match vocabulary and dim")

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, token) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray | None:
        i = self.index.get(token)
        return None if i is None else self.matrix[i]

    def sum_vectors(self, tokens: Iterable[str]) -> tuple[np.ndarray, int]:
        rows = [self.index[t] for t in tokens if t in self.index]
        if not rows:
            return np.zeros(self.dim), 0
        return self.matrix[rows].sum(axis=0), len(rows)

    @classmethod
    def from_dict(cls, vectors: Mapping[str, Sequence[float]], dim: int) -> "EmbeddingTable":
        tokens = list(vectors)
        mat = np.array([vectors[t] for t in tokens], dtype=float).reshape(len(tokens), dim)
        return cls(dim, {t: i for i, t in enumerate(tokens)}, mat)


def load_embeddings(path) -> EmbeddingTable:
    """Read the word2vec text format: ``<vocab> <dim>`` header, then rows."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingError(f"{path}: header must be '<vocab_size> <dim>'")
        try:
            declared, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingError(f"{path}: header must be two integers") from None
        if dim <= 0:
            raise EmbeddingError(f"{path}: dim must be positive")
        index: dict[str, int] = {}
        rows: list[list[float]] = []
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(" ")
            if not parts or not parts[0]:
                continue
            token, values = parts[0], [v for v in parts[1:] if v]
            if len(values) != dim:
                raise EmbeddingError(f"{path}:{lineno}: row {token!r} has {len(values)} values, expected {dim}")
            try:
                vec = [float(v) for v in values]
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric value in row {token!r}") from None
            if token in index:
                log.warning("%s:%d: duplicate token %r, keeping the last", path, lineno, token)
                rows[index[token]] = vec
            else:
                index[token] = len(rows)
                rows.append(vec)
    if len(rows) != declared:
        log.warning("%s: header declares %d tokens, read %d", path, declared, len(rows))
    return EmbeddingTable(dim, index, np.array(rows, dtype=float).reshape(len(rows), dim))


@dataclass(frozen=True, eq=False)
class ConceptVector:
    concept: str
    vector: np.ndarray
    token_count: int


def concept_vector(concept: Concept, emb: EmbeddingTable) -> ConceptVector:
    vec, n = emb.sum_vectors(word_split(concept.definition))
    return ConceptVector(concept.id, vec, n)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return max(-1.0, min(1.0, float(np.dot(u, v)) / (nu * nv)))


def context_score(window: Sequence[str], cvec: ConceptVector, emb: EmbeddingTable) -> float:
    """Cosine between the summed window vectors and the concept vector.

    Zero vectors on either side score 0.0.
    """
    wvec, _ = emb.sum_vectors(window)
    return cosine(wvec, cvec.vector)


def dumps_vectors(vectors: Mapping[str, ConceptVector]) -> str:
    lines = []
    for cui in sorted(vectors):
        cv = vectors[cui]
        lines.append("\t".join([cui, str(cv.token_count)] + [repr(float(x)) for x in cv.vector]) + "\n")
    return "".join(lines)


def write_vectors(vectors: Mapping[str, ConceptVector], path) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_vectors(vectors))


def read_vectors(path) -> dict[str, ConceptVector]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 3:
                continue
            out[parts[0]] = ConceptVector(parts[0], np.array([float(x) for x in parts[2:]]), int(parts[1]))
    return out
