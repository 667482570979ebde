import json
from pathlib import Path

import pytest

from gazlink.kb import Concept, KnowledgeBase, load_kb

FIXTURES = Path(__file__).parent / "fixtures"


def nos_kb(n: int) -> KnowledgeBase:
    """n concepts whose two labels differ only by a trailing NOS; scaled
    copies of the committed 30-concept fixture beyond 30."""
    base = load_kb(FIXTURES / "nos30.jsonl")
    concepts = []
    for i in range(n):
        src = base[sorted(c.id for c in base)[i % len(base)]]
        concepts.append(Concept(f"{src.id}-{i // len(base)}" if i >= len(base) else src.id, src.labels, src.types))
    return KnowledgeBase.from_concepts(concepts)


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def toy_kb() -> KnowledgeBase:
    return load_kb(FIXTURES / "toy_kb.jsonl")


def write_jsonl(path: Path, records) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


def toy_resources(scale: float = 1.0, embeddings=None):
    """Toy KB compiled with fixture priors and derived synonyms.

    ``scale`` multiplies every static score, for invariance checks.
    """
    from gazlink.context import concept_vector, load_embeddings
    from gazlink.corpus import gold_mentions, read_documents, read_gold
    from gazlink.lexicon import build_lexicon, compile_resources, default_stoplist, expand_with_synonyms
    from gazlink.priors import PriorStore, corpus_priors, filter_cooc, pagerank, read_cooc
    from gazlink.synonyms import SynonymTable

    kb = load_kb(FIXTURES / "toy_kb.jsonl")
    docs = {d.id: d.text for d in read_documents(FIXTURES / "priors_docs.jsonl")}
    freq, link = corpus_priors(gold_mentions(read_gold(FIXTURES / "priors_gold.jsonl"), docs))
    pr = pagerank(filter_cooc(read_cooc(FIXTURES / "cooc.tsv"))).scores
    priors = PriorStore(
        {k: v * scale for k, v in freq.items()},
        {k: v * scale for k, v in link.items()},
        {k: v * scale for k, v in pr.items()},
    )
    table = SynonymTable({("pancreatic", "pancreas"): 20.0, ("pancreas", "pancreatic"): 20.0,
                          ("cancer", "neoplasm"): 20.0, ("neoplasm", "cancer"): 20.0,
                          ("steatoses", "steatosis"): 20.0, ("(finding)", ""): 2000.0})
    lex = expand_with_synonyms(build_lexicon(kb), table, 3, 0.9 * scale)
    vectors = None
    if embeddings:
        emb = load_embeddings(embeddings)
        vectors = {c.id: concept_vector(c, emb) for c in kb}
    res = compile_resources(lex, default_stoplist(), priors, vectors)
    if embeddings:
        res = res.with_embeddings(emb)
    return res


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
