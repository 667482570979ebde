"""Flat concept knowledge base: one JSON object per line.

Each record carries ``cui``, ``labels`` (first is the preferred name),
``types`` and an optional ``definition`` used as the concept's abstract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping


class KBError(ValueError):
    pass


def _check_cui(cui) -> str:
    if not isinstance(cui, str) or not cui or any(c.isspace() for c in cui):
        raise KBError(f"invalid concept id {cui!r}")
    return cui


@dataclass(frozen=True)
class Concept:
    id: str
    labels: tuple[str, ...]
    types: frozenset[str] = frozenset()
    definition: str = ""

    def __post_init__(self):
        _check_cui(self.id)
        labels = tuple(dict.fromkeys(self.labels))
        if not labels or any(not isinstance(l, str) or not l for l in labels):
            raise KBError(f"{self.id}: labels must be a non-empty list of non-empty strings")
        if any(not isinstance(t, str) or not t for t in self.types):
            raise KBError(f"{self.id}: empty semantic type")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "types", frozenset(self.types))

    @property
    def preferred_label(self) -> str:
        return self.labels[0]

    def to_record(self) -> dict:
        return {
            "cui": self.id,
            "labels": list(self.labels),
            "types": sorted(self.types),
            "definition": self.definition,
        }


@dataclass(frozen=True)
class KnowledgeBase:
    concepts: Mapping[str, Concept] = field(default_factory=dict)

    @classmethod
    def from_concepts(cls, concepts: Iterable[Concept]) -> "KnowledgeBase":
        out: dict[str, Concept] = {}
        for c in concepts:
            if c.id in out:
                raise KBError(f"duplicate concept id {c.id}")
            out[c.id] = c
        return cls(out)

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self) -> Iterator[Concept]:
        return iter(self.concepts.values())

    def __contains__(self, cui) -> bool:
        return cui in self.concepts

    def __getitem__(self, cui: str) -> Concept:
        return self.concepts[cui]


@dataclass(frozen=True)
class TypeFilter:
    """Semantic types to keep; an empty set keeps everything."""

    allowed: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "allowed", frozenset(self.allowed))

    def admits(self, concept: Concept) -> bool:
        return not self.allowed or bool(self.allowed & concept.types)


def parse_record(line: str, lineno: int = 0) -> Concept:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as e:
        raise KBError(f"line {lineno}: malformed JSON ({e.msg})") from None
    if not isinstance(rec, dict):
        raise KBError(f"line {lineno}: record is not an object")
    try:
        labels = rec["labels"]
        if not isinstance(labels, list):
            raise KBError("labels must be a list")
        types = rec.get("types", [])
        if not isinstance(types, list):
            raise KBError("types must be a list")
        definition = rec.get("definition", "")
        if not isinstance(definition, str):
            raise KBError("definition must be a string")
        return Concept(rec["cui"], tuple(labels), frozenset(types), definition)
    except KeyError as e:
        raise KBError(f"line {lineno}: missing field {e.args[0]!r}") from None
    except KBError as e:
        raise KBError(f"line {lineno}: {e}") from None


def load_kb(path) -> KnowledgeBase:
    """Read a JSON-lines KB file. Blank lines are ignored."""
    concepts: dict[str, Concept] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            c = parse_record(line, lineno)
            if c.id in concepts:
                raise KBError(f"line {lineno}: duplicate concept id {c.id}")
            concepts[c.id] = c
    return KnowledgeBase(concepts)


def dumps_kb(kb: KnowledgeBase) -> str:
    return "".join(json.dumps(c.to_record(), ensure_ascii=False) + "\n" for c in kb)


def save_kb(kb: KnowledgeBase, path) -> None:
    Path(path).write_text(dumps_kb(kb), encoding="utf-8", newline="\n")


def apply_type_filter(kb: KnowledgeBase, type_filter: TypeFilter) -> KnowledgeBase:
    return KnowledgeBase({c.id: c for c in kb if type_filter.admits(c)})
