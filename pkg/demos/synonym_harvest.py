"""Harvest word-level synonyms from the labels a knowledge base already has.

Run from the repository root:  python3 demos/synonym_harvest.py
"""

from _paths import FIXTURES
from gazlink.kb import Concept, KnowledgeBase, load_kb
from gazlink.synonyms import align_label_pair, derive_synonyms, finalize_table, normalized_levenshtein, read_overrides

kb = load_kb(FIXTURES / "toy_kb.jsonl")
print(f"{len(kb)} concepts in the toy KB")

# Two labels of one concept, aligned word by word. Near-identical words pair
# up through edit distance; what is left over pairs with what is left over.
for a, b in [("pancreatic cancer", "neoplasm, pancreas"), ("hepatic steatosis", "liver steatoses")]:
    print(f"{a!r} ~ {b!r}: {align_label_pair(a, b)}")

for a, b in [("steatoses", "steatosis"), ("doudenal", "duodenal"), ("cancer", "neoplasm")]:
    print(f"normalized distance {a}/{b} = {normalized_levenshtein(a, b):.3f}")

# Every concept contributes one unit of evidence spread over its label pairs.
raw = derive_synonyms(kb)
for pair in sorted(raw):
    print(f"  {pair[0]:>12} -> {pair[1] or '<drop>':<12} {raw[pair]:.2f}")

# Scores that small never clear the default threshold of 12; a toy KB needs a toy threshold.
print("default threshold keeps", len(finalize_table(raw)), "pairs")
table = finalize_table(raw, 1, 1, read_overrides(FIXTURES / "overrides.tsv"))
print("threshold 1 plus overrides keeps", len(table), "pairs, e.g.", table.by_source()["pancreas"])

# A word that can simply be dropped (here "nos") needs far more support.
def nos_kb(n):
    return KnowledgeBase.from_concepts(
        Concept(f"C{i:07d}", (f"disease{i}, unspecified", f"disease{i}, unspecified NOS")) for i in range(n)
    )

for n in (30, 1020):
    score = derive_synonyms(nos_kb(n))[("nos", "")]
    kept = ("nos", "") in finalize_table(derive_synonyms(nos_kb(n)))
    print(f"{n:>5} supporting concepts: ('nos','') scores {score:.0f}, kept={kept}")
