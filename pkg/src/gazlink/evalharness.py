"""Scoring system output against gold standoff annotations.

Span-level precision/recall/F1 come in two modes: ``strict`` needs the
exact gold span, ``lenient`` any overlap of at least one character; both
need the system concept to be among the gold concepts. Accuracy and
Scott's Pi are token-level: every token gets the concept of the
annotation covering it, or NIL, for system and gold alike.
"""

from __future__ import annotations

import bisect
import statistics
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .text import tokenize

if TYPE_CHECKING:
    from .annotator import Annotation, Document, RankingPolicy
    from .lexicon import CompiledResources

NIL = ""
STRICT = "strict"
LENIENT = "lenient"


@dataclass(frozen=True)
class GoldAnnotation:
    start: int
    end: int
    cuis: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "cuis", frozenset(self.cuis))
        if not self.cuis:
            raise ValueError("gold annotation needs at least one concept")
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span ({self.start}, {self.end})")


@dataclass(frozen=True)
class SystemAnnotation:
    start: int
    end: int
    cui: str


@dataclass(frozen=True)
class MatchResult:
    tp: int
    fp: int
    fn: int
    pairs: tuple[tuple[int, int], ...] = ()


def _accepts(mode: str, sys_ann: SystemAnnotation, gold: GoldAnnotation) -> bool:
    if sys_ann.cui not in gold.cuis:
        return False
    if mode == STRICT:
        return sys_ann.start == gold.start and sys_ann.end == gold.end
    return sys_ann.start < gold.end and gold.start < sys_ann.end


def match_annotations(
    system: Sequence[SystemAnnotation], gold: Sequence[GoldAnnotation], mode: str = LENIENT
) -> MatchResult:
    """Greedy left-to-right one-to-one pairing within a document.

    ``pairs`` holds (system index, gold index) into the inputs.
    """
    if mode not in (STRICT, LENIENT):
        raise ValueError(f"unknown mode {mode!r}")
    s_order = sorted(range(len(system)), key=lambda i: (system[i].start, system[i].end, system[i].cui))
    g_order = sorted(range(len(gold)), key=lambda j: (gold[j].start, gold[j].end))
    used = [False] * len(gold)
    pairs = []
    for i in s_order:
        s = system[i]
        for j in g_order:
            g = gold[j]
            if g.start >= s.end:
                break
            if not used[j] and _accepts(mode, s, g):
                used[j] = True
                pairs.append((i, j))
                break
    tp = len(pairs)
    return MatchResult(tp, len(system) - tp, len(gold) - tp, tuple(pairs))


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def scotts_pi(a: Sequence[str], b: Sequence[str]) -> tuple[float, float]:
    """(observed agreement, Scott's Pi) for two parallel label sequences.

    Expected agreement pools both annotators' label distributions. When
    it is 1 (one shared label everywhere) Pi is defined as 1.0.
    """
    if len(a) != len(b):
        raise ValueError("label sequences differ in length")
    n = len(a)
    if n == 0:
        return 1.0, 1.0
    po = sum(x == y for x, y in zip(a, b)) / n
    pooled = Counter(a) + Counter(b)
    pe = sum((c / (2 * n)) ** 2 for c in pooled.values())
    if pe >= 1.0:
        return po, 1.0 if po == 1.0 else 0.0
    return po, (po - pe) / (1.0 - pe)


def _token_categories(tokens, starts, spans: Iterable[tuple[int, int, object]]) -> list:
    cats: list = [None] * len(tokens)
    for start, end, value in sorted(spans, key=lambda t: (t[0], t[1])):
        i = max(0, bisect.bisect_right(starts, start) - 1)
        while i < len(tokens) and tokens[i].start < end:
            if tokens[i].end > start and cats[i] is None:
                cats[i] = value
            i += 1
    return cats


def token_labels(
    text: str, system: Sequence[SystemAnnotation], gold: Sequence[GoldAnnotation]
) -> tuple[list[str], list[str]]:
    """Parallel per-token categories (system, gold) for one document.

    A gold token allowing several concepts takes the system's choice when
    it is among them, otherwise the smallest concept id.
    """
    tokens = tokenize(text)
    starts = [t.start for t in tokens]
    sys_cats = _token_categories(tokens, starts, ((a.start, a.end, a.cui) for a in system))
    gold_cats = _token_categories(tokens, starts, ((g.start, g.end, g.cuis) for g in gold))
    sys_out, gold_out = [], []
    for s, g in zip(sys_cats, gold_cats):
        s = NIL if s is None else s
        if g is None:
            g = NIL
        elif s in g:
            g = s
        else:
            g = min(g)
        sys_out.append(s)
        gold_out.append(g)
    return sys_out, gold_out


def token_accuracy_and_pi(
    system: Mapping[str, Sequence[SystemAnnotation]],
    gold: Mapping[str, Sequence[GoldAnnotation]],
    docs: Mapping[str, str],
) -> tuple[float, float]:
    sys_all: list[str] = []
    gold_all: list[str] = []
    for doc_id in sorted(docs):
        s, g = token_labels(docs[doc_id], system.get(doc_id, ()), gold.get(doc_id, ()))
        sys_all += s
        gold_all += g
    return scotts_pi(sys_all, gold_all)


@dataclass(frozen=True)
class ModeScores:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "ModeScores":
        return cls(tp, fp, fn, *prf(tp, fp, fn))


@dataclass
class EvalReport:
    strict: ModeScores
    lenient: ModeScores
    accuracy: float | None = None
    scotts_pi: float | None = None
    seconds: float | None = None
    per_document: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def table(self) -> str:
        """Plain-text summary laid out like a results table."""

        def f(x):
            return "-" if x is None else f"{x:.3f}"

        head = ["Secs", "Prec L", "Rec L", "F1 L", "Prec S", "Rec S", "F1 S", "Acc", "Scott's Pi"]
        row = [
            "-" if self.seconds is None else f"{self.seconds:.2f}",
            f(self.lenient.precision), f(self.lenient.recall), f(self.lenient.f1),
            f(self.strict.precision), f(self.strict.recall), f(self.strict.f1),
            f(self.accuracy), f(self.scotts_pi),
        ]
        widths = [max(len(h), len(v)) for h, v in zip(head, row)]
        fmt = " | ".join("{:>%d}" % w for w in widths)
        return fmt.format(*head) + "\n" + fmt.format(*row) + "\n"


def evaluate(
    system: Mapping[str, Sequence[SystemAnnotation]],
    gold: Mapping[str, Sequence[GoldAnnotation]],
    docs: Mapping[str, str] | None = None,
    seconds: float | None = None,
) -> EvalReport:
    counts = {STRICT: [0, 0, 0], LENIENT: [0, 0, 0]}
    per_doc = {}
    for doc_id in sorted(set(system) | set(gold)):
        s, g = system.get(doc_id, ()), gold.get(doc_id, ())
        row = {}
        for mode in (STRICT, LENIENT):
            m = match_annotations(s, g, mode)
            for k, v in enumerate((m.tp, m.fp, m.fn)):
                counts[mode][k] += v
            row[mode] = {"tp": m.tp, "fp": m.fp, "fn": m.fn}
        per_doc[doc_id] = row
    acc = pi = None
    if docs is not None:
        acc, pi = token_accuracy_and_pi(system, gold, docs)
    return EvalReport(
        ModeScores.from_counts(*counts[STRICT]),
        ModeScores.from_counts(*counts[LENIENT]),
        acc,
        pi,
        seconds,
        per_doc,
    )


@dataclass
class TimedRun:
    annotations: list
    seconds: float
    runs: list[float]

    @property
    def median(self) -> float:
        return statistics.median(self.runs)

    @property
    def stdev(self) -> float:
        return statistics.stdev(self.runs) if len(self.runs) > 1 else 0.0


def timed_run(
    res: "CompiledResources",
    corpus: Sequence["Document"],
    policy: "RankingPolicy | None" = None,
    repeat: int = 1,
    threads: int = 1,
) -> TimedRun:
    """Wall-clock annotation time, resource loading excluded.

    ``seconds`` is the median over ``repeat`` runs; the annotations are
    those of the last run.
    """
    from .annotator import Annotator, RankingPolicy

    annotator = Annotator(res, policy or RankingPolicy())
    runs = []
    out: list = []
    for _ in range(max(1, repeat)):
        t0 = time.perf_counter()
        out = annotator.annotate_all(corpus, threads)
        runs.append(time.perf_counter() - t0)
    return TimedRun(out, statistics.median(runs), runs)


def to_system(annotations: Sequence["Annotation"]) -> list[SystemAnnotation]:
    return [SystemAnnotation(a.start, a.end, a.chosen) for a in annotations]
