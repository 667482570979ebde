"""Compile a resource bundle from the toy inputs and annotate four short notes.

Run from the repository root:  python3 demos/annotate_notes.py
"""

import tempfile

from _paths import FIXTURES
from gazlink.annotator import WEIGHTED, Annotator, Document, RankingPolicy, to_standoff
from gazlink.context import concept_vector, load_embeddings
from gazlink.corpus import gold_mentions, read_documents, read_gold
from gazlink.kb import load_kb
from gazlink.lexicon import build_lexicon, compile_resources, default_stoplist, expand_with_synonyms, load_resources
from gazlink.priors import PriorStore, corpus_priors, filter_cooc, pagerank, read_cooc
from gazlink.synonyms import derive_synonyms, finalize_table, read_overrides

kb = load_kb(FIXTURES / "toy_kb.jsonl")
table = finalize_table(derive_synonyms(kb), 1, 1, read_overrides(FIXTURES / "overrides.tsv"))

# The lexicon starts as the KB labels; synonyms add one-word-swapped variants.
base = build_lexicon(kb)
lex = expand_with_synonyms(base, table)
print(f"labels: {len(base)} original, {len(lex)} after expansion")
print("some expanded labels:", sorted(k for k, p in lex.provenance.items() if p != "original")[:6])

docs = {d.id: d.text for d in read_documents(FIXTURES / "priors_docs.jsonl")}
freq, link = corpus_priors(gold_mentions(read_gold(FIXTURES / "priors_gold.jsonl"), docs))
pr = pagerank(filter_cooc(read_cooc(FIXTURES / "cooc.tsv"))).scores

emb = load_embeddings(FIXTURES / "embeddings.txt")
vectors = {c.id: concept_vector(c, emb) for c in kb}
res = compile_resources(lex, default_stoplist(), PriorStore(freq, link, pr), vectors, {"demo": True})

# Bundles are plain files; reloading gives the same fingerprint.
with tempfile.TemporaryDirectory() as d:
    res.save(d)
    again = load_resources(d)
print("fingerprint", res.fingerprint[:16], "reloaded equal:", again.fingerprint == res.fingerprint)

notes = read_documents(FIXTURES / "docs")
for doc in notes:
    print(f"\n{doc.id}: {doc.text.strip()}")
    for a in Annotator(res).annotate(doc):
        tag = "" if a.label_provenance == "original" else "  [expanded]"
        print(f"  {a.start:>3}-{a.end:<3} {a.matched_text!r:<22} -> {a.chosen} {res.preferred_label(a.chosen)!r}{tag}")

# "OD" has three readings. Look at how each policy scores them.
od = Document("od", "Admitted after an OD of the drug at a high dose.")
for policy in (RankingPolicy(), RankingPolicy(WEIGHTED)):
    [a] = Annotator(res, policy).annotate(od)
    print(f"\n{policy.kind}:")
    for c in a.candidates:
        print(f"  {c.concept}  link {c.scores['link_prob']:.2f}  pagerank {c.scores['pagerank']:.3f}  combined {c.combined:.3f}")

# Context scoring compares the words around a mention with each concept's vector.
ctx = Annotator(res.with_embeddings(emb), RankingPolicy(use_context=True))
[a] = ctx.annotate(od)
print("\ncontext scores:", {c.concept: round(c.scores["context"], 3) for c in a.candidates})

record = to_standoff(od, [a], res)
print("standoff keys:", sorted(record["annotations"][0]))
