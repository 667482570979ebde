"""Reading and writing documents and standoff annotation files."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

from .annotator import Document
from .evalharness import GoldAnnotation, SystemAnnotation


class CorpusError(ValueError):
    pass


def _parse_line(path, lineno: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise CorpusError(f"{path}:{lineno}: malformed JSON ({e.msg})") from None
    if not isinstance(obj, dict):
        raise CorpusError(f"{path}:{lineno}: expected a JSON object")
    return obj


def _jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if line.strip():
                yield lineno, _parse_line(path, lineno, line)


def iter_documents(path, skip_errors: bool = False, errors: list | None = None) -> Iterator[Document]:
    """Documents from a ``.jsonl`` file of ``{id, text}`` or a directory
    of ``.txt`` files (id = file stem), in sorted order."""
    p = Path(path)
    if p.is_dir():
        for f in sorted(p.glob("*.txt")):
            try:
                text = f.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as e:
                if not skip_errors:
                    raise CorpusError(f"{f}: unreadable document ({e})") from None
                if errors is not None:
                    errors.append(str(f))
                continue
            yield Document(f.stem, text)
        return
    if not p.exists():
        raise CorpusError(f"{p}: no such file or directory")
    with open(p, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = _parse_line(p, lineno, line)
                if not isinstance(obj.get("id"), str) or not isinstance(obj.get("text"), str):
                    raise CorpusError(f"{p}:{lineno}: document needs string 'id' and 'text'")
            except CorpusError as e:
                if not skip_errors:
                    raise
                if errors is not None:
                    errors.append(str(e))
                continue
            yield Document(obj["id"], obj["text"])


def read_documents(path) -> list[Document]:
    return list(iter_documents(path))


def _records(path) -> Iterator[tuple[str, dict]]:
    p = Path(path)
    if p.is_dir():
        for f in sorted(p.glob("*.json")):
            if f.name == "run.json":
                continue
            yield str(f), json.loads(f.read_text(encoding="utf-8"))
    else:
        for lineno, obj in _jsonl(p):
            yield f"{p}:{lineno}", obj


def read_gold(path) -> dict[str, list[GoldAnnotation]]:
    """``{doc_id, annotations: [{start, end, cuis}]}`` per line."""
    out: dict[str, list[GoldAnnotation]] = {}
    for where, obj in _records(path):
        try:
            anns = []
            for a in obj["annotations"]:
                cuis = a["cuis"] if "cuis" in a else [a["cui"]]
                anns.append(GoldAnnotation(int(a["start"]), int(a["end"]), frozenset(cuis)))
            out.setdefault(str(obj["doc_id"]), []).extend(anns)
        except (KeyError, TypeError, ValueError) as e:
            raise CorpusError(f"{where}: malformed gold record ({e})") from None
    return out


def read_system(path) -> dict[str, list[SystemAnnotation]]:
    """Standoff output written by ``annotate`` (directory or JSON lines)."""
    out: dict[str, list[SystemAnnotation]] = {}
    for where, obj in _records(path):
        try:
            anns = []
            for a in obj["annotations"]:
                cui = a["cui"] if "cui" in a else sorted(a["cuis"])[0]
                anns.append(SystemAnnotation(int(a["start"]), int(a["end"]), cui))
            out.setdefault(str(obj["doc_id"]), []).extend(anns)
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise CorpusError(f"{where}: malformed system record ({e})") from None
    return out


def write_gold(gold: dict[str, Iterable[GoldAnnotation]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc_id in sorted(gold):
            anns = [{"start": g.start, "end": g.end, "cuis": sorted(g.cuis)} for g in sorted(gold[doc_id], key=lambda g: (g.start, g.end))]
            fh.write(json.dumps({"doc_id": doc_id, "annotations": anns}, ensure_ascii=False) + "\n")


def gold_mentions(gold: dict[str, list[GoldAnnotation]], docs: dict[str, str]) -> Iterator[tuple[str, list[str]]]:
    """``(surface text, cuis)`` per gold annotation, for corpus priors."""
    for doc_id in sorted(gold):
        if doc_id not in docs:
            raise CorpusError(f"gold document {doc_id!r} has no text")
        text = docs[doc_id]
        for g in gold[doc_id]:
            if not 0 <= g.start < g.end <= len(text):
                raise CorpusError(f"{doc_id}: span ({g.start}, {g.end}) outside the document")
            yield text[g.start:g.end], sorted(g.cuis)
