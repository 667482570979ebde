import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gazlink.context import (
    ConceptVector,
    EmbeddingError,
    EmbeddingTable,
    concept_vector,
    context_score,
    cosine,
    load_embeddings,
    read_vectors,
    write_vectors,
)
from gazlink.kb import Concept

ABC = EmbeddingTable.from_dict({"a": [1, 0, 0], "b": [0, 1, 0], "c": [0, 0, 1]}, 3)


def cv(vec):
    return ConceptVector("C1", np.asarray(vec, dtype=float), 1)


class TestLoad:
    def test_direct_parse(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("2 3\na 1 0 0\nb 0 1 0\n")
        emb = load_embeddings(p)
        assert len(emb) == 2 and emb.dim == 3
        assert list(emb.vector("b")) == [0.0, 1.0, 0.0]

    def test_short_row_named(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("2 3\na 1 0 0\nb 0 1\n")
        with pytest.raises(EmbeddingError, match="'b'"):
            load_embeddings(p)

    def test_empty_vocabulary(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("0 3\n")
        emb = load_embeddings(p)
        assert len(emb) == 0 and emb.dim == 3

    def test_duplicate_keeps_last(self, tmp_path, caplog):
        p = tmp_path / "v.txt"
        p.write_text("2 2\na 1 0\na 0 1\n")
        emb = load_embeddings(p)
        assert list(emb.vector("a")) == [0.0, 1.0]
        assert "duplicate" in caplog.text

    def test_bad_header(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("a 1 0\n")
        with pytest.raises(EmbeddingError):
            load_embeddings(p)

    def test_fixture(self, fixtures):
        emb = load_embeddings(fixtures / "embeddings.txt")
        assert len(emb) == 10 and emb.dim == 3


class TestConceptVector:
    def test_sum(self):
        v = concept_vector(Concept("C1", ("x",), definition="a b"), ABC)
        assert list(v.vector) == [1.0, 1.0, 0.0] and v.token_count == 2

    @pytest.mark.parametrize("definition", ["", "zzz yyy"])
    def test_zero_vector(self, definition):
        v = concept_vector(Concept("C1", ("x",), definition=definition), ABC)
        assert not v.vector.any() and v.token_count == 0

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.sampled_from("abcxy"), max_size=8), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, words, rnd):
        a = concept_vector(Concept("C1", ("x",), definition=" ".join(words)), ABC)
        b = concept_vector(Concept("C1", ("x",), definition=" ".join(rnd.sample(words, len(words)))), ABC)
        assert np.array_equal(a.vector, b.vector) and a.token_count == b.token_count
        assert (a.token_count == 0) == (not a.vector.any())

    def test_round_trip(self, tmp_path):
        vecs = {"C1": ConceptVector("C1", np.array([0.1, 0.2, 1 / 3]), 3)}
        write_vectors(vecs, tmp_path / "c" / "vectors.tsv")
        back = read_vectors(tmp_path / "c" / "vectors.tsv")
        assert np.array_equal(back["C1"].vector, vecs["C1"].vector) and back["C1"].token_count == 3


class TestScore:
    def test_identity(self):
        assert context_score(["a", "b"], cv([1, 1, 0]), ABC) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert context_score(["a"], cv([0, 1, 0]), ABC) == 0.0

    def test_diagonal(self):
        assert context_score(["a"], cv([1, 1, 0]), ABC) == pytest.approx(1 / math.sqrt(2), abs=1e-5)

    def test_zero_vectors(self):
        assert context_score([], cv([1, 0, 0]), ABC) == 0.0
        assert context_score(["a"], cv([0, 0, 0]), ABC) == 0.0

    vectors = st.lists(st.one_of(st.just(0.0), st.floats(1e-3, 100), st.floats(-100, -1e-3)), min_size=3, max_size=3)

    @settings(max_examples=150, deadline=None)
    @given(vectors, vectors, st.floats(0.01, 100))
    def test_cosine_properties(self, u, v, k):
        u, v = np.array(u), np.array(v)
        c = cosine(u, v)
        assert -1.0 <= c <= 1.0
        assert c == pytest.approx(cosine(v, u), abs=1e-12)
        assert cosine(k * u, v) == pytest.approx(c, abs=1e-9)
        if not u.any() or not v.any():
            assert c == 0.0
