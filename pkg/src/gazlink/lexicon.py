"""Gazetteer construction and the compiled resource bundle.

The bundle is a directory of flat, sorted text files so that identical
inputs give byte-identical output::

    lexicon.tsv            label, cui, preferred (0/1), provenance
    stoplist.txt           one normalized label per line
    priors/*.tsv           see ``priors.PriorStore``
    context/vectors.tsv    only when concept vectors were compiled in
    meta.json              format version, fingerprint, counts, config

The matcher is not serialized; it is rebuilt from ``lexicon.tsv``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass, field, replace
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Iterable, Mapping

from .context import ConceptVector, EmbeddingTable, dumps_vectors, read_vectors
from .kb import KnowledgeBase
from .matcher import TokenAutomaton
from .priors import PriorStore
from .synonyms import SynonymTable
from .text import normalize_label, word_spans

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
ORIGINAL = "original"
EXPANDED = "synonym-expanded"
SCORE_NAMES = ("link_prob", "corpus_freq", "pagerank", "synonym_penalty")
DEFAULT_SYNONYM_PENALTY = 0.9


class ResourceError(ValueError):
    pass


@dataclass(frozen=True)
class CandidateEntry:
    concept: str
    label_is_preferred: bool = False
    expanded: bool = False
    static_scores: Mapping[str, float] = field(default_factory=dict)

    @property
    def provenance(self) -> str:
        return EXPANDED if self.expanded else ORIGINAL


@dataclass(frozen=True)
class Lexicon:
    """Normalized label -> {cui: CandidateEntry}."""

    entries: Mapping[str, Mapping[str, CandidateEntry]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, label) -> bool:
        return label in self.entries

    def keys(self) -> list[str]:
        return sorted(self.entries)

    def candidates(self, label: str) -> list[CandidateEntry]:
        return [self.entries[label][c] for c in sorted(self.entries[label])]

    @property
    def provenance(self) -> dict[str, str]:
        """A label is original if any concept carries it as a real label."""
        return {label: self.provenance_of(label) for label in self.entries}

    def provenance_of(self, label: str) -> str:
        return ORIGINAL if any(not e.expanded for e in self.entries[label].values()) else EXPANDED

    def concepts(self) -> set[str]:
        return {c for cands in self.entries.values() for c in cands}

    def preferred_labels(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for label in sorted(self.entries):
            for cui, e in self.entries[label].items():
                if e.label_is_preferred:
                    out.setdefault(cui, label)
        return out


def build_lexicon(kb: KnowledgeBase) -> Lexicon:
    entries: dict[str, dict[str, CandidateEntry]] = {}
    for concept in kb:
        for i, label in enumerate(concept.labels):
            key = normalize_label(label)
            if not key:
                continue
            slot = entries.setdefault(key, {})
            prev = slot.get(concept.id)
            preferred = i == 0 or (prev is not None and prev.label_is_preferred)
            slot[concept.id] = CandidateEntry(concept.id, preferred, False, {"synonym_penalty": 1.0})
    return Lexicon(entries)


def _tidy(label: str) -> str:
    s = re.sub(r"\s+", " ", label).strip(" ,")
    return re.sub(r" ,", ",", s)


def label_variants(key: str, by_source: Mapping[str, list[str]], max_tokens: int) -> list[str]:
    """Single-substitution variants of ``key``; empty targets delete the word."""
    spans = word_spans(key)
    if len(spans) > max_tokens:
        return []
    out = []
    for s, e in spans:
        for target in by_source.get(key[s:e].lower(), ()):
            variant = normalize_label(_tidy(key[:s] + target + key[e:]))
            if variant and variant != key:
                out.append(variant)
    return out


def expand_with_synonyms(
    lex: Lexicon,
    table: SynonymTable,
    max_tokens: int = 3,
    penalty: float = DEFAULT_SYNONYM_PENALTY,
) -> Lexicon:
    """Add one-substitution variants of short original labels.

    Only labels of at most ``max_tokens`` words are permuted, and only
    from their original (non-expanded) candidates. Existing entries are
    never altered.
    """
    if max_tokens < 1:
        raise ValueError("max_tokens must be >= 1")
    by_source = table.by_source()
    if not by_source:
        return lex
    entries = {k: dict(v) for k, v in lex.entries.items()}
    for key in sorted(lex.entries):
        originals = [c for c in sorted(lex.entries[key]) if not lex.entries[key][c].expanded]
        if not originals:
            continue
        for variant in label_variants(key, by_source, max_tokens):
            slot = entries.setdefault(variant, {})
            for cui in originals:
                if cui not in slot:
                    slot[cui] = CandidateEntry(cui, False, True, {"synonym_penalty": penalty})
    return Lexicon(entries)


@dataclass(frozen=True, eq=False)
class ContextModel:
    embeddings: EmbeddingTable
    vectors: Mapping[str, ConceptVector]


@dataclass(frozen=True, eq=False)
class CompiledResources:
    lexicon: Lexicon
    stoplist: frozenset[str]
    priors: PriorStore
    automaton: TokenAutomaton
    fingerprint: str
    config: Mapping[str, object] = field(default_factory=dict)
    concept_vectors: Mapping[str, ConceptVector] | None = None
    context: ContextModel | None = None

    def with_embeddings(self, emb: EmbeddingTable) -> "CompiledResources":
        if not self.concept_vectors:
            raise ResourceError("bundle has no concept vectors; compile with embeddings to enable context scoring")
        bad = next((v for v in self.concept_vectors.values() if v.vector.shape != (emb.dim,)), None)
        if bad is not None:
            raise ResourceError(f"concept vector dim {bad.vector.shape[0]} != embedding dim {emb.dim}")
        return replace(self, context=ContextModel(emb, self.concept_vectors))

    def preferred_label(self, cui: str) -> str:
        return self._preferred.get(cui, "")

    @property
    def _preferred(self) -> dict[str, str]:
        cache = self.__dict__.get("_pref_cache")
        if cache is None:
            cache = self.lexicon.preferred_labels()
            object.__setattr__(self, "_pref_cache", cache)
        return cache

    def counts(self) -> dict[str, int]:
        prov = self.lexicon.provenance
        return {
            "labels": len(self.lexicon),
            "original_labels": sum(1 for p in prov.values() if p == ORIGINAL),
            "expanded_labels": sum(1 for p in prov.values() if p == EXPANDED),
            "candidates": sum(len(v) for v in self.lexicon.entries.values()),
            "concepts": len(self.lexicon.concepts()),
            "patterns": self.automaton.pattern_count,
            "stoplist": len(self.stoplist),
        }

    def save(self, directory) -> Path:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for rel, content in _bundle_files(self.lexicon, self.stoplist, self.priors, self.concept_vectors).items():
            path = d / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(content)
        meta = {
            "format_version": FORMAT_VERSION,
            "fingerprint": self.fingerprint,
            "counts": self.counts(),
            "config": dict(sorted(self.config.items())),
        }
        (d / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return d


def default_stoplist() -> frozenset[str]:
    text = importlib_resources.files("gazlink.data").joinpath("stoplist.txt").read_text(encoding="utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#"))


def read_stoplist(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip() and not line.startswith("#")]


def _serialize_lexicon(lex: Lexicon) -> str:
    lines = []
    for label in sorted(lex.entries):
        for cui in sorted(lex.entries[label]):
            e = lex.entries[label][cui]
            lines.append(f"{label}\t{cui}\t{int(e.label_is_preferred)}\t{e.provenance}\n")
    return "".join(lines)


def _bundle_files(lex, stoplist, priors: PriorStore, vectors) -> dict[str, str]:
    files = {
        "lexicon.tsv": _serialize_lexicon(lex),
        "stoplist.txt": "".join(f"{s}\n" for s in sorted(stoplist)),
    }
    files.update({f"priors/{name}": text for name, text in priors.dumps().items()})
    if vectors:
        files["context/vectors.tsv"] = dumps_vectors(vectors)
    return files


def _fingerprint(files: Mapping[str, str], config: Mapping[str, object]) -> str:
    h = hashlib.sha256()
    for rel in sorted(files):
        h.update(rel.encode("utf-8") + b"\0")
        h.update(files[rel].encode("utf-8") + b"\0")
    h.update(json.dumps(dict(config), sort_keys=True).encode("utf-8"))
    return h.hexdigest()


def _join_scores(lex: Lexicon, priors: PriorStore) -> Lexicon:
    entries = {}
    for label, cands in lex.entries.items():
        entries[label] = {
            cui: replace(e, static_scores={**priors.scores_for(label, cui), "synonym_penalty": e.static_scores.get("synonym_penalty", 1.0)})
            for cui, e in cands.items()
        }
    return Lexicon(entries)


def compile_resources(
    lex: Lexicon,
    stoplist: Iterable[str] = (),
    priors: PriorStore | None = None,
    concept_vectors: Mapping[str, ConceptVector] | None = None,
    config: Mapping[str, object] | None = None,
) -> CompiledResources:
    """Freeze a lexicon, stoplist and priors into a runtime bundle."""
    priors = priors or PriorStore()
    config = dict(config or {})
    stop: set[str] = set()
    for raw in stoplist:
        norm = normalize_label(raw)
        if not norm:
            log.warning("skipping stoplist entry %r: empty after normalization", raw)
            continue
        stop.add(norm)
    stop_f = frozenset(stop)
    joined = _join_scores(lex, priors)
    automaton = TokenAutomaton(k for k in sorted(joined.entries) if k not in stop_f)
    files = _bundle_files(joined, stop_f, priors, concept_vectors)
    return CompiledResources(
        lexicon=joined,
        stoplist=stop_f,
        priors=priors,
        automaton=automaton,
        fingerprint=_fingerprint(files, config),
        config=config,
        concept_vectors=dict(concept_vectors) if concept_vectors else None,
    )


def load_resources(directory) -> CompiledResources:
    d = Path(directory)
    if not (d / "meta.json").exists():
        raise ResourceError(f"{d}: not a resource bundle (meta.json missing)")
    meta = json.loads((d / "meta.json").read_text(encoding="utf-8"))
    if meta.get("format_version") != FORMAT_VERSION:
        raise ResourceError(f"{d}: unsupported bundle format {meta.get('format_version')!r}")
    config = meta.get("config", {})
    penalty = float(config.get("synonym_penalty", DEFAULT_SYNONYM_PENALTY))
    entries: dict[str, dict[str, CandidateEntry]] = {}
    with open(d / "lexicon.tsv", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4 or parts[3] not in (ORIGINAL, EXPANDED):
                raise ResourceError(f"{d / 'lexicon.tsv'}:{lineno}: malformed row")
            label, cui, pref, prov = parts
            expanded = prov == EXPANDED
            entries.setdefault(label, {})[cui] = CandidateEntry(
                cui, pref == "1", expanded, {"synonym_penalty": penalty if expanded else 1.0}
            )
    stoplist = read_stoplist(d / "stoplist.txt") if (d / "stoplist.txt").exists() else []
    priors = PriorStore.load(d / "priors")
    vpath = d / "context" / "vectors.tsv"
    vectors = read_vectors(vpath) if vpath.exists() else None
    res = compile_resources(Lexicon(entries), stoplist, priors, vectors, config)
    if meta.get("fingerprint") and meta["fingerprint"] != res.fingerprint:
        raise ResourceError(f"{d}: fingerprint mismatch, bundle files were modified")
    return res

