"""Score a system's annotations against gold, then time a run end to end.

Run from the repository root:  python3 demos/evaluate_system.py
"""

import random

from _paths import FIXTURES
from gazlink.annotator import Document
from gazlink.corpus import read_documents, read_gold, read_system
from gazlink.evalharness import GoldAnnotation, SystemAnnotation, evaluate, scotts_pi, timed_run, token_labels
from gazlink.kb import load_kb
from gazlink.lexicon import build_lexicon, compile_resources, default_stoplist
from gazlink.text import tokenize

docs = {d.id: d.text for d in read_documents(FIXTURES / "eval_docs.jsonl")}
gold = read_gold(FIXTURES / "eval_gold.jsonl")
system = read_system(FIXTURES / "eval_system.jsonl")

report = evaluate(system, gold, docs)
print(report.table())
for doc_id, modes in report.per_document.items():
    print(doc_id, {m: (r["tp"], r["fp"], r["fn"]) for m, r in modes.items()})

# "fever since" overlaps gold "fever": credited only under lenient matching.
text = docs["e2"]
print("\ne2 tokens, system vs gold:")
sys_lab, gold_lab = token_labels(text, system["e2"], gold["e2"])
for tok, s, g in zip(tokenize(text), sys_lab, gold_lab, strict=True):
    print(f"  {tok.text:<10} {s or '-':<10} {g or '-'}")

# Agreement is chance-corrected: two annotators who guess from the same
# skewed label distribution get high raw agreement but Pi near zero.
rng = random.Random(0)
cats = [""] * 8 + ["C1", "C2"]
a = [rng.choice(cats) for _ in range(5000)]
b = [rng.choice(cats) for _ in range(5000)]
po, pi = scotts_pi(a, b)
print(f"\nindependent guessing: raw agreement {po:.3f}, Scott's Pi {pi:.3f}")

# A one-token disagreement in ten tokens is enough to push Pi below zero.
_, pi = scotts_pi(*token_labels("t0 t1 t2 t3 t4 t5 t6 t7 t8 t9", [SystemAnnotation(0, 2, "C1")], [GoldAnnotation(3, 5, frozenset({"C1"}))]))
print(f"ten tokens, one mislabelled each way: Pi {pi:.4f}")

# Timing: annotate a few hundred documents with a bundle built from the KB labels alone.
res = compile_resources(build_lexicon(load_kb(FIXTURES / "toy_kb.jsonl")), default_stoplist())
corpus = [Document(f"n{i}", d.text) for i, d in enumerate(read_documents(FIXTURES / "docs") * 200)]
run = timed_run(res, corpus, repeat=5)
chars = sum(len(d.text) for d in corpus)
print(f"\n{len(corpus)} documents, {chars} chars in {run.seconds * 1000:.1f} ms (median of 5)")
