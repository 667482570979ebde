"""Runtime linking: gazetteer match, stoplist, candidate lookup, ranking.

Every surviving mention links to its top-ranked candidate; there is no
abstention. Two ranking policies are available:

``cascade`` (default)
    Lexicographic: link probability, then corpus frequency, then
    PageRank, then context score, then original-before-expanded label,
    then concept id.
``weighted``
    ``combined = (weights . scores) * synonym_penalty``, ties broken by
    concept id.
"""

from __future__ import annotations

import bisect
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .context import context_score
from .lexicon import EXPANDED, ORIGINAL, CandidateEntry, CompiledResources, ResourceError
from .text import iter_word_tokens

CASCADE = "cascade"
WEIGHTED = "weighted"
SCORE_NAMES = ("link_prob", "corpus_freq", "pagerank", "context", "synonym_penalty")
DEFAULT_WEIGHTS = {"link_prob": 10.0, "corpus_freq": 3.0, "pagerank": 1.0, "context": 1.0}


@dataclass(frozen=True)
class RankingPolicy:
    kind: str = CASCADE
    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    use_context: bool = False
    window: int = 10

    def __post_init__(self):
        if self.kind not in (CASCADE, WEIGHTED):
            raise ValueError(f"unknown ranking policy {self.kind!r}")
        unknown = set(self.weights) - set(DEFAULT_WEIGHTS)
        if unknown:
            raise ValueError(f"unknown score weights: {sorted(unknown)}")
        if self.window < 0:
            raise ValueError("window must be >= 0")
        object.__setattr__(self, "weights", {**DEFAULT_WEIGHTS, **self.weights})


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass(frozen=True)
class ScoredCandidate:
    concept: str
    scores: Mapping[str, float]
    combined: float
    provenance: str = ORIGINAL


class Annotation(NamedTuple):
    start: int
    end: int
    matched_text: str
    label: str
    candidates: tuple[ScoredCandidate, ...]
    label_provenance: str = ORIGINAL

    @property
    def chosen(self) -> str:
        return self.candidates[0].concept

    @property
    def combined(self) -> float:
        return self.candidates[0].combined


def find_mentions(doc: Document, res: CompiledResources) -> list[tuple[int, int, str]]:
    """Non-overlapping ``(start, end, label)`` gazetteer hits, by start."""
    if not doc.text:
        return []
    return res.automaton.resolve(doc.text)


def retrieve_candidates(label: str, res: CompiledResources) -> list[CandidateEntry]:
    try:
        return res.lexicon.candidates(label)
    except KeyError:
        raise ResourceError(f"label {label!r} matched but is missing from the lexicon") from None


def mention_window(doc: Document, start: int, end: int, width: int) -> list[str]:
    """Up to ``width`` lowercased words either side of the mention."""
    words = list(iter_word_tokens(doc.text))
    return _window(words, [w.start for w in words], start, end, width)


def _window(words, word_starts, start, end, width):
    lo = bisect.bisect_left(word_starts, start)
    hi = bisect.bisect_left(word_starts, end)
    left = words[max(0, lo - width):lo]
    right = words[hi:hi + width]
    return [w.text.lower() for w in left + right]


def _combined(scores: Mapping[str, float], weights: Mapping[str, float]) -> float:
    return sum(weights[k] * scores[k] for k in DEFAULT_WEIGHTS) * scores["synonym_penalty"]


def _cascade_key(sc: ScoredCandidate):
    s = sc.scores
    return (-s["link_prob"], -s["corpus_freq"], -s["pagerank"], -s["context"], sc.provenance == EXPANDED, sc.concept)


def rank(
    candidates: Sequence[CandidateEntry],
    doc: Document | None,
    span: tuple[int, int] | None,
    res: CompiledResources,
    policy: RankingPolicy = RankingPolicy(),
    window: Sequence[str] | None = None,
) -> list[ScoredCandidate]:
    if not candidates:
        raise ValueError("cannot rank an empty candidate list")
    ctx_model = res.context if policy.use_context else None
    if policy.use_context and ctx_model is None:
        raise ResourceError("context scoring requested but no embeddings are attached")
    if ctx_model is not None and window is None:
        window = mention_window(doc, span[0], span[1], policy.window)

    scored = []
    for cand in candidates:
        scores = {name: float(cand.static_scores.get(name, 0.0)) for name in SCORE_NAMES}
        if "synonym_penalty" not in cand.static_scores:
            scores["synonym_penalty"] = 1.0
        if ctx_model is not None:
            cvec = ctx_model.vectors.get(cand.concept)
            scores["context"] = context_score(window, cvec, ctx_model.embeddings) if cvec is not None else 0.0
        scored.append(ScoredCandidate(cand.concept, scores, _combined(scores, policy.weights), cand.provenance))

    if policy.kind == CASCADE:
        scored.sort(key=_cascade_key)
    else:
        scored.sort(key=lambda sc: (-sc.combined, sc.concept))
    return scored


class Annotator:
    """Binds immutable resources to a policy.

    Without context scoring a label's ranking never changes, so it is
    computed once per label and reused.
    """

    def __init__(self, res: CompiledResources, policy: RankingPolicy = RankingPolicy()):
        if policy.use_context and res.context is None:
            raise ResourceError("context scoring requested but no embeddings are attached")
        self.res = res
        self.policy = policy
        self._cache: dict[str, tuple[tuple[ScoredCandidate, ...], str]] = {}

    def _static(self, label: str):
        hit = self._cache.get(label)
        if hit is None:
            cands = retrieve_candidates(label, self.res)
            ranked = tuple(rank(cands, None, None, self.res, self.policy))
            prov = self.res.lexicon.provenance_of(label)
            hit = self._cache[label] = (ranked, prov)
        return hit

    def annotate(self, doc: Document) -> list[Annotation]:
        mentions = find_mentions(doc, self.res)
        if not mentions:
            return []
        text = doc.text
        out = []
        if self.policy.use_context:
            words = list(iter_word_tokens(text))
            starts = [w.start for w in words]
            for s, e, label in mentions:
                cands = retrieve_candidates(label, self.res)
                win = _window(words, starts, s, e, self.policy.window)
                ranked = tuple(rank(cands, doc, (s, e), self.res, self.policy, window=win))
                out.append(Annotation(s, e, text[s:e], label, ranked, self.res.lexicon.provenance_of(label)))
        else:
            for s, e, label in mentions:
                ranked, prov = self._static(label)
                out.append(Annotation(s, e, text[s:e], label, ranked, prov))
        return out

    def annotate_all(self, docs: Iterable[Document], threads: int = 1) -> list[list[Annotation]]:
        docs = list(docs)
        if threads <= 1:
            return [self.annotate(d) for d in docs]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(self.annotate, docs))


def annotate(doc: Document, res: CompiledResources, policy: RankingPolicy = RankingPolicy()) -> list[Annotation]:
    return Annotator(res, policy).annotate(doc)


def _candidate_dict(sc: ScoredCandidate) -> dict:
    return {"cui": sc.concept, "combined": sc.combined, "provenance": sc.provenance, "scores": dict(sc.scores)}


def to_standoff(doc: Document, annotations: Sequence[Annotation], res: CompiledResources) -> dict:
    return {
        "doc_id": doc.id,
        "annotations": [
            {
                "start": a.start,
                "end": a.end,
                "text": a.matched_text,
                "cui": a.chosen,
                "preferred_label": res.preferred_label(a.chosen),
                "label_provenance": a.label_provenance,
                "combined": a.combined,
                "scores": dict(a.candidates[0].scores),
                "candidates": [_candidate_dict(c) for c in a.candidates],
            }
            for a in annotations
        ],
    }


def dumps_standoff(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True, indent=1) + "\n"
