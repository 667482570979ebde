import json
import subprocess
import sys

import pytest

from gazlink.cli import main

from conftest import FIXTURES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def outputs(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.glob("*.json")) if p.name != "run.json"}


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    """Synonyms, priors and a bundle built from the fixture inputs."""
    d = tmp_path_factory.mktemp("bundle")
    argv = ["derive-synonyms", "--kb", FIXTURES / "toy_kb.jsonl", "--overrides", FIXTURES / "overrides.tsv",
            "--threshold", "1", "--empty-threshold", "1", "--out", d / "syn.tsv"]
    assert main([str(a) for a in argv]) == 0
    argv = ["compile", "--kb", FIXTURES / "toy_kb.jsonl", "--synonyms", d / "syn.tsv", "--cooc", FIXTURES / "cooc.tsv",
            "--gold", FIXTURES / "priors_gold.jsonl", "--docs", FIXTURES / "priors_docs.jsonl", "--out", d / "res"]
    assert main([str(a) for a in argv]) == 0
    return d


class TestDeriveSynonyms:
    def test_running_example(self, bundle):
        rows = [line.split("\t") for line in (bundle / "syn.tsv").read_text().splitlines()[1:]]
        pairs = {(r[0], r[1]) for r in rows}
        assert {("pancreatic", "pancreas"), ("pancreas", "pancreatic"), ("cancer", "neoplasm")} <= pairs
        assert ("declined", "decline") not in pairs

    def test_forced_pair_written(self, bundle):
        assert "steatoses\tsteatosis\t20.0" in (bundle / "syn.tsv").read_text()

    def test_huge_threshold_gives_empty_table(self, capsys, tmp_path):
        code, out, _ = run(capsys, "derive-synonyms", "--kb", FIXTURES / "toy_kb.jsonl", "--threshold", "1e9", "--out", tmp_path / "s.tsv")
        assert code == 0
        assert (tmp_path / "s.tsv").read_text().splitlines() == ["from\tto\tscore"]
        assert "table size 0" in out

    def test_missing_kb(self, capsys, tmp_path):
        missing = tmp_path / "nope.jsonl"
        code, out, err = run(capsys, "derive-synonyms", "--kb", missing, "--out", tmp_path / "s.tsv")
        assert code != 0 and str(missing) in err and out == ""

    def test_config_echoed(self, bundle):
        assert "threshold = 1.0" in (bundle / "syn.tsv.config").read_text()


class TestCompile:
    def test_bundle_layout(self, bundle):
        res = bundle / "res"
        meta = json.loads((res / "meta.json").read_text())
        assert len(meta["fingerprint"]) == 64
        assert meta["counts"]["expanded_labels"] > 0
        for rel in ("lexicon.tsv", "stoplist.txt", "priors/link_prob.tsv", "priors/pagerank.tsv", "run.config"):
            assert (res / rel).exists()

    def test_reproducible(self, bundle, capsys, tmp_path):
        code, out, _ = run(capsys, "compile", "--kb", FIXTURES / "toy_kb.jsonl", "--synonyms", bundle / "syn.tsv",
                           "--cooc", FIXTURES / "cooc.tsv", "--gold", FIXTURES / "priors_gold.jsonl",
                           "--docs", FIXTURES / "priors_docs.jsonl", "--out", tmp_path / "again")
        assert code == 0
        first = {p.relative_to(bundle / "res"): p.read_bytes() for p in (bundle / "res").rglob("*") if p.is_file()}
        second = {p.relative_to(tmp_path / "again"): p.read_bytes() for p in (tmp_path / "again").rglob("*") if p.is_file()}
        assert first == second
        assert json.loads((bundle / "res" / "meta.json").read_text())["fingerprint"] in out

    def test_embeddings_and_type_filter(self, capsys, tmp_path):
        code, out, _ = run(capsys, "compile", "--kb", FIXTURES / "toy_kb.jsonl", "--types", "Sign or Symptom",
                           "--embeddings", FIXTURES / "embeddings.txt", "--stoplist", "none", "--out", tmp_path / "b")
        assert code == 0 and "concepts 2," in out
        assert (tmp_path / "b" / "context" / "vectors.tsv").exists()

    def test_gold_without_docs(self, capsys, tmp_path):
        code, _, err = run(capsys, "compile", "--kb", FIXTURES / "toy_kb.jsonl", "--gold", FIXTURES / "priors_gold.jsonl", "--out", tmp_path / "b")
        assert code == 1 and "--docs" in err


class TestPriorCommands:
    def test_pagerank(self, capsys, tmp_path):
        code, out, _ = run(capsys, "pagerank", "--cooc", FIXTURES / "cooc.tsv", "--out", tmp_path)
        assert code == 0 and "converged" in out
        rows = [line.split("\t") for line in (tmp_path / "pagerank.tsv").read_text().splitlines()]
        assert len(rows) == 6 and abs(sum(float(r[1]) for r in rows) - 1) < 1e-9

    def test_priors(self, capsys, tmp_path):
        code, _, _ = run(capsys, "priors", "--gold", FIXTURES / "priors_gold.jsonl", "--docs", FIXTURES / "priors_docs.jsonl", "--out", tmp_path)
        assert code == 0
        assert "OD\tC9000001\t0.75" in (tmp_path / "link_prob.tsv").read_text()


class TestAnnotate:
    def test_golden(self, bundle, capsys, tmp_path):
        code, _, _ = run(capsys, "annotate", "--resources", bundle / "res", "--in", FIXTURES / "docs", "--out", tmp_path)
        assert code == 0
        golden = outputs(FIXTURES / "golden")
        assert golden and outputs(tmp_path) == golden

    def test_jsonl_input_matches_directory(self, bundle, capsys, tmp_path):
        run(capsys, "annotate", "--resources", bundle / "res", "--in", FIXTURES / "docs.jsonl", "--out", tmp_path)
        assert outputs(tmp_path) == outputs(FIXTURES / "golden")

    def test_threads(self, bundle, capsys, tmp_path):
        run(capsys, "annotate", "--resources", bundle / "res", "--in", FIXTURES / "docs", "--out", tmp_path / "t1", "--threads", "1")
        run(capsys, "annotate", "--resources", bundle / "res", "--in", FIXTURES / "docs", "--out", tmp_path / "t8", "--threads", "8")
        assert outputs(tmp_path / "t1") == outputs(tmp_path / "t8")

    def test_empty_input(self, bundle, capsys, tmp_path):
        (tmp_path / "in").mkdir()
        code, out, _ = run(capsys, "annotate", "--resources", bundle / "res", "--in", tmp_path / "in", "--out", tmp_path / "out")
        assert code == 0 and outputs(tmp_path / "out") == {} and "documents 0" in out

    def test_echoed_config_reproduces_run(self, bundle, capsys, tmp_path):
        run(capsys, "annotate", "--resources", bundle / "res", "--in", FIXTURES / "docs", "--out", tmp_path / "a", "--policy", "weighted", "--w-pagerank", "5")
        run(capsys, "annotate", "--resources", bundle / "res", "--in", FIXTURES / "docs", "--out", tmp_path / "b", "--config", tmp_path / "a" / "run.config")
        assert (tmp_path / "a" / "run.config").read_text() == (tmp_path / "b" / "run.config").read_text()
        assert outputs(tmp_path / "a") == outputs(tmp_path / "b")

    def test_context_scoring(self, capsys, tmp_path):
        run(capsys, "compile", "--kb", FIXTURES / "toy_kb.jsonl", "--embeddings", FIXTURES / "embeddings.txt", "--out", tmp_path / "b")
        code, _, _ = run(capsys, "annotate", "--resources", tmp_path / "b", "--in", FIXTURES / "docs", "--out", tmp_path / "o",
                         "--context-embeddings", FIXTURES / "embeddings.txt")
        assert code == 0
        ann = json.loads((tmp_path / "o" / "note2.json").read_text())["annotations"]
        assert any(a["scores"]["context"] != 0.0 for a in ann)

    def test_bad_jsonl_line(self, bundle, capsys, tmp_path):
        src = tmp_path / "docs.jsonl"
        src.write_text('{"id": "a", "text": "fever"}\n{"id": 3}\n')
        code, _, err = run(capsys, "annotate", "--resources", bundle / "res", "--in", src, "--out", tmp_path / "o")
        assert code == 1 and ":2" in err
        code, _, _ = run(capsys, "annotate", "--resources", bundle / "res", "--in", src, "--out", tmp_path / "o", "--skip-errors")
        assert code == 0 and (tmp_path / "o" / "a.json").exists()


class TestEvaluate:
    def test_fixture_report(self, capsys, tmp_path):
        code, out, _ = run(capsys, "evaluate", "--gold", FIXTURES / "eval_gold.jsonl", "--system", FIXTURES / "eval_system.jsonl",
                           "--docs", FIXTURES / "eval_docs.jsonl", "--report", tmp_path / "r.json")
        assert code == 0 and "strict" in out and "lenient" in out
        got = json.loads((tmp_path / "r.json").read_text())
        want = json.loads((FIXTURES / "eval_expected.json").read_text())
        for mode in ("strict", "lenient"):
            for k, v in want[mode].items():
                assert got[mode][k] == pytest.approx(v, abs=1e-9)
        assert got["scotts_pi"] == pytest.approx(want["scotts_pi"], abs=1e-9)
        assert got["config"]["policy"] == "cascade"

    def test_gold_against_itself(self, capsys, tmp_path):
        code, out, _ = run(capsys, "evaluate", "--gold", FIXTURES / "eval_gold.jsonl", "--system", FIXTURES / "eval_gold.jsonl",
                           "--mode", "lenient", "--report", tmp_path / "r.json")
        got = json.loads((tmp_path / "r.json").read_text())
        assert code == 0 and "strict" not in out
        for mode in ("strict", "lenient"):
            assert (got[mode]["precision"], got[mode]["recall"], got[mode]["f1"]) == (1.0, 1.0, 1.0)

    def test_annotate_output_directory(self, bundle, capsys, tmp_path):
        run(capsys, "annotate", "--resources", bundle / "res", "--in", FIXTURES / "docs", "--out", tmp_path)
        code, out, _ = run(capsys, "evaluate", "--gold", FIXTURES / "eval_gold.jsonl", "--system", tmp_path)
        assert code == 0 and "tp 0" in out


class TestBench:
    def test_rows(self, bundle, capsys):
        code, out, _ = run(capsys, "bench", "--resources", bundle / "res", "--in", FIXTURES / "docs", "--repeat", "3")
        lines = out.splitlines()
        assert code == 0 and len(lines) == 4
        assert [l.split("\t")[0] for l in lines] == ["run 1", "run 2", "run 3", "median"]


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("thresold = 3\n")
    code, _, err = run(capsys, "derive-synonyms", "--kb", FIXTURES / "toy_kb.jsonl", "--config", cfg, "--out", tmp_path / "s.tsv")
    assert code == 1 and "thresold" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gazlink", "pagerank", "--cooc", str(FIXTURES / "cooc.tsv"), "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stderr == ""
