"""``gazlink`` command line: derive-synonyms, compile, pagerank, priors,
annotate, evaluate, bench."""

from __future__ import annotations

import argparse
import json
import logging
import statistics
import sys
import time
from pathlib import Path

from . import context as ctx
from .annotator import Annotator, RankingPolicy, dumps_standoff, to_standoff
from .config import ConfigError, RunConfig, load_config
from .corpus import gold_mentions, iter_documents, read_documents, read_gold, read_system
from .evalharness import LENIENT, STRICT, evaluate
from .kb import TypeFilter, apply_type_filter, load_kb
from .lexicon import build_lexicon, compile_resources, default_stoplist, expand_with_synonyms, load_resources, read_stoplist
from .priors import PriorStore, corpus_priors, filter_cooc, pagerank, read_cooc
from .synonyms import (
    AlignmentConfig,
    OverrideList,
    derive_synonyms,
    finalize_table,
    harvest_summary,
    read_overrides,
    read_table,
    write_table,
)

log = logging.getLogger("gazlink")

# RunConfig keys that may be set from flags, with their parsers
_CONFIG_FLAGS = {
    "threshold": float,
    "empty_threshold": float,
    "max_normalized_distance": float,
    "min_word_length": int,
    "max_tokens": int,
    "synonym_penalty": float,
    "damping": float,
    "tol": float,
    "max_iter": int,
    "min_count": int,
    "since_year": int,
    "smoothing": float,
    "policy": str,
    "window": int,
    "w_link_prob": float,
    "w_corpus_freq": float,
    "w_pagerank": float,
    "w_context": float,
}


def _add_config_flags(p: argparse.ArgumentParser, *names: str) -> None:
    p.add_argument("--config", help="key = value file; flags override it")
    for name in names:
        flag = "--" + name.replace("_", "-")
        kw = {"choices": ["cascade", "weighted"]} if name == "policy" else {}
        p.add_argument(flag, dest=name, type=_CONFIG_FLAGS[name], default=None, **kw)


def _config(args) -> RunConfig:
    overrides = {k: getattr(args, k) for k in _CONFIG_FLAGS if getattr(args, k, None) is not None}
    return load_config(args.config, overrides)


def _echo_config(cfg: RunConfig, path: Path) -> None:
    path.write_text(cfg.dumps(), encoding="utf-8")


def _types(arg: str | None) -> TypeFilter:
    if not arg:
        return TypeFilter()
    return TypeFilter(frozenset(t.strip() for t in arg.split(",") if t.strip()))


def _policy(cfg: RunConfig, use_context: bool = False) -> RankingPolicy:
    return RankingPolicy(cfg.policy, cfg.weights(), use_context, cfg.window)


def cmd_derive_synonyms(args) -> int:
    cfg = _config(args)
    kb = apply_type_filter(load_kb(args.kb), _types(args.types))
    align = AlignmentConfig(cfg.max_normalized_distance, cfg.min_word_length)
    raw = derive_synonyms(kb, align)
    overrides = read_overrides(args.overrides) if args.overrides else OverrideList()
    table = finalize_table(raw, cfg.threshold, cfg.empty_threshold, overrides)
    out = Path(args.out)
    write_table(table, out)
    _echo_config(cfg, out.with_name(out.name + ".config"))
    accepted, rejected = harvest_summary(raw, table)
    print(f"accepted {accepted} pairs, rejected {rejected}, table size {len(table)}")
    return 0


def _build_priors(args, cfg: RunConfig) -> PriorStore:
    base = PriorStore.load(args.priors_dir) if getattr(args, "priors_dir", None) else PriorStore()
    freq, link, pr = dict(base.concept_freq), dict(base.link_prob), dict(base.pagerank)
    if getattr(args, "gold", None):
        if not args.docs:
            raise ConfigError("--gold needs --docs to recover mention text")
        docs = {d.id: d.text for d in read_documents(args.docs)}
        freq, link = corpus_priors(gold_mentions(read_gold(args.gold), docs), cfg.smoothing)
    if getattr(args, "cooc", None):
        graph = filter_cooc(read_cooc(args.cooc), cfg.min_count, cfg.since_year)
        pr = pagerank(graph, cfg.damping, cfg.tol, cfg.max_iter).scores
    return PriorStore(freq, link, pr)


def cmd_compile(args) -> int:
    cfg = _config(args)
    kb = apply_type_filter(load_kb(args.kb), _types(args.types))
    lex = build_lexicon(kb)
    n_original = len(lex)
    if args.synonyms:
        table = read_table(args.synonyms, cfg.threshold, cfg.empty_threshold)
        lex = expand_with_synonyms(lex, table, cfg.max_tokens, cfg.synonym_penalty)
    if args.stoplist == "none":
        stop = []
    elif args.stoplist:
        stop = read_stoplist(args.stoplist)
    else:
        stop = sorted(default_stoplist())
    priors = _build_priors(args, cfg)
    vectors = None
    if args.embeddings:
        emb = ctx.load_embeddings(args.embeddings)
        vectors = {c.id: ctx.concept_vector(c, emb) for c in kb}
    res = compile_resources(lex, stop, priors, vectors, {**cfg.to_dict()})
    out = res.save(args.out)
    _echo_config(cfg, out / "run.config")
    counts = res.counts()
    print(
        f"concepts {counts['concepts']}, labels {counts['labels']} "
        f"(original {n_original}, expanded {counts['expanded_labels']}), patterns {counts['patterns']}"
    )
    print(f"fingerprint {res.fingerprint}")
    return 0


def cmd_pagerank(args) -> int:
    cfg = _config(args)
    graph = filter_cooc(read_cooc(args.cooc), cfg.min_count, cfg.since_year)
    result = pagerank(graph, cfg.damping, cfg.tol, cfg.max_iter)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = PriorStore(pagerank=result.scores).dumps()
    (out / "pagerank.tsv").write_text(files["pagerank.tsv"], encoding="utf-8")
    _echo_config(cfg, out / "pagerank.config")
    state = "converged" if result.converged else "NOT converged"
    print(f"nodes {len(result.scores)}, edges {len(graph)}, {state} after {result.iterations} iterations")
    return 0


def cmd_priors(args) -> int:
    cfg = _config(args)
    docs = {d.id: d.text for d in read_documents(args.docs)}
    freq, link = corpus_priors(gold_mentions(read_gold(args.gold), docs), cfg.smoothing)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = PriorStore(freq, link).dumps()
    for name in ("concept_freq.tsv", "link_prob.tsv"):
        (out / name).write_text(files[name], encoding="utf-8")
    _echo_config(cfg, out / "priors.config")
    print(f"concepts {len(freq)}, label-concept pairs {len(link)}")
    return 0


def _safe_name(doc_id: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in doc_id) or "_"


def cmd_annotate(args) -> int:
    cfg = _config(args)
    res = load_resources(args.resources)
    if args.context_embeddings:
        res = res.with_embeddings(ctx.load_embeddings(args.context_embeddings))
    annotator = Annotator(res, _policy(cfg, bool(args.context_embeddings)))
    errors: list[str] = []
    docs = list(iter_documents(args.input, args.skip_errors, errors))
    for e in errors:
        log.warning("skipped unreadable document %s", e)
    results = annotator.annotate_all(docs, args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for doc, anns in zip(docs, results):
        (out / f"{_safe_name(doc.id)}.json").write_text(dumps_standoff(to_standoff(doc, anns, res)), encoding="utf-8")
    meta = {"fingerprint": res.fingerprint, "documents": len(docs), "config": cfg.to_dict()}
    (out / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _echo_config(cfg, out / "run.config")
    print(f"documents {len(docs)}, annotations {sum(len(a) for a in results)}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    gold = read_gold(args.gold)
    system = read_system(args.system)
    docs = {d.id: d.text for d in read_documents(args.docs)} if args.docs else None
    report = evaluate(system, gold, docs)
    modes = [STRICT, LENIENT] if args.mode == "both" else [args.mode]
    for mode in modes:
        m = getattr(report, mode)
        print(f"{mode:8s} tp {m.tp} fp {m.fp} fn {m.fn}  P {m.precision:.4f}  R {m.recall:.4f}  F1 {m.f1:.4f}")
    sys.stdout.write(report.table())
    if args.report:
        payload = {**report.to_dict(), "config": cfg.to_dict()}
        Path(args.report).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def cmd_bench(args) -> int:
    cfg = _config(args)
    res = load_resources(args.resources)
    docs = read_documents(args.input)
    chars = sum(len(d.text) for d in docs)
    annotator = Annotator(res, _policy(cfg))
    times = []
    for i in range(max(1, args.repeat)):
        t0 = time.perf_counter()
        annotator.annotate_all(docs, args.threads)
        dt = time.perf_counter() - t0
        times.append(dt)
        print(f"run {i + 1}\t{dt:.4f} s\t{chars / dt if dt else float('inf'):.0f} chars/s")
    med = statistics.median(times)
    print(f"median\t{med:.4f} s\t{chars / med if med else float('inf'):.0f} chars/s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazlink", description="Gazetteer-driven entity linking toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive-synonyms", help="harvest word synonyms from alternative labels")
    p.add_argument("--kb", required=True)
    p.add_argument("--types", help="comma-separated semantic types to keep")
    p.add_argument("--overrides", help="block/force TSV")
    p.add_argument("--out", required=True)
    _add_config_flags(p, "threshold", "empty_threshold", "max_normalized_distance", "min_word_length")
    p.set_defaults(func=cmd_derive_synonyms)

    p = sub.add_parser("compile", help="build a resource bundle")
    p.add_argument("--kb", required=True)
    p.add_argument("--types")
    p.add_argument("--synonyms", help="synonym TSV from derive-synonyms")
    p.add_argument("--stoplist", help="stoplist file, or 'none' (default: built-in list)")
    p.add_argument("--cooc", help="co-occurrence TSV: cui1 cui2 count year")
    p.add_argument("--gold", help="gold JSON lines for corpus priors")
    p.add_argument("--docs", help="documents matching --gold")
    p.add_argument("--priors-dir", help="precomputed priors directory")
    p.add_argument("--embeddings", help="word vectors; stores concept vectors for context scoring")
    p.add_argument("--out", required=True)
    _add_config_flags(
        p, "threshold", "empty_threshold", "max_tokens", "synonym_penalty",
        "damping", "tol", "max_iter", "min_count", "since_year", "smoothing",
    )
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("pagerank", help="static PageRank over a co-occurrence table")
    p.add_argument("--cooc", required=True)
    p.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p, "damping", "tol", "max_iter", "min_count", "since_year")
    p.set_defaults(func=cmd_pagerank)

    p = sub.add_parser("priors", help="concept frequency and link probability from a gold corpus")
    p.add_argument("--gold", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--out", required=True, help="output directory")
    _add_config_flags(p, "smoothing")
    p.set_defaults(func=cmd_priors)

    p = sub.add_parser("annotate", help="link documents against a bundle")
    p.add_argument("--resources", required=True)
    p.add_argument("--in", dest="input", required=True, help="directory of .txt files or JSON lines {id, text}")
    p.add_argument("--out", required=True)
    p.add_argument("--context-embeddings")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--skip-errors", action="store_true")
    _add_config_flags(p, "policy", "window", "w_link_prob", "w_corpus_freq", "w_pagerank", "w_context")
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("evaluate", help="score system output against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--docs", help="document texts, needed for accuracy and Scott's Pi")
    p.add_argument("--mode", choices=[STRICT, LENIENT, "both"], default="both")
    p.add_argument("--report", help="write the full JSON report here")
    _add_config_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="time annotation of a corpus")
    p.add_argument("--resources", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    _add_config_flags(p, "policy", "w_link_prob", "w_corpus_freq", "w_pagerank", "w_context")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as e:
        print(f"gazlink {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
