import logging
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sensebench.embeddings import (
    SenseKey,
    cosine,
    cosine_with_flag,
    load_embeddings,
    load_sense_embeddings,
    sense_centroid,
    senses_of,
)
from sensebench.errors import EmbeddingFormatError


def test_load_two_lines():
    t = load_embeddings(["a 1 0\n", "b 0 1\n"])
    assert t.dimension == 2
    assert len(t) == 2
    np.testing.assert_array_equal(t["b"], [0.0, 1.0])


def test_header_dimension_mismatch():
    with pytest.raises(EmbeddingFormatError, match="dimension mismatch"):
        load_embeddings(["2 3\n", "a 1 0\n", "b 0 1\n"])


def test_duplicate_token_last_wins(caplog):
    with caplog.at_level(logging.WARNING):
        t = load_embeddings(["a 1 0", "a 0 1"])
    assert len(t) == 1
    np.testing.assert_array_equal(t["a"], [0.0, 1.0])
    assert "duplicate" in caplog.text


@pytest.mark.parametrize(
    "lines, match",
    [
        ([], "empty"),
        (["", "  "], "empty"),
        (["a 1 0", "b 1"], "dimension mismatch"),
        (["a 1 x"], "non-numeric"),
        (["3 2", "a 1 0", "b 0 1"], "declares 3"),
        (["a"], "without vector"),
    ],
)
def test_load_errors(lines, match):
    with pytest.raises(EmbeddingFormatError, match=match):
        load_embeddings(lines)


def test_header_and_crlf():
    t = load_embeddings(["2 2\r\n", "a 1 0\r\n", "b 0 1\r\n"])
    assert t.dimension == 2 and set(t.vocab) == {"a", "b"}


def test_expect_header_flag():
    with pytest.raises(EmbeddingFormatError, match="header"):
        load_embeddings(["a 1 0"], expect_header=True)
    # a 2-column numeric first line is data when the header is switched off
    t = load_embeddings(["1 2", "3 4"], expect_header=False)
    assert t.dimension == 1 and set(t.vocab) == {"1", "3"}


def test_table_is_read_only():
    t = load_embeddings(["a 1 0"])
    with pytest.raises(ValueError):
        t.matrix[0, 0] = 5.0


def test_load_determinism():
    lines = ["3 2", "a 1 0.5", "b 0 1", "c -1 2e-3"]
    t1, t2 = load_embeddings(lines), load_embeddings(lines)
    assert t1.vocab == t2.vocab
    assert t1.matrix.tobytes() == t2.matrix.tobytes()


def test_sense_embeddings_index():
    t = load_sense_embeddings(["bank%s1 1 0", "bank%s2 0 1"])
    assert len(t.lemma_index["bank"]) == 2
    assert t.skipped == 0


def test_sense_embeddings_skip_line():
    t = load_sense_embeddings(["bank 1 0", "bank%s1 0 1"])
    assert t.skipped == 1
    assert list(t.lemma_index) == ["bank"]


def test_sense_embeddings_two_lemmas():
    t = load_sense_embeddings(["run%v1 1 0", "run%v2 0 1", "bank%s1 1 1"])
    assert {k: len(v) for k, v in t.lemma_index.items()} == {"run": 2, "bank": 1}


def test_sense_embeddings_none_valid():
    with pytest.raises(EmbeddingFormatError, match="no valid sense keys"):
        load_sense_embeddings(["bank 1 0"])


def test_sense_embeddings_custom_separator():
    t = load_sense_embeddings(["bank_bn:1 1 0"], separator="_")
    assert t.lemma_index["bank"] == (SenseKey("bank", "bn:1"),)


def test_sense_index_matches_entries():
    t = load_sense_embeddings(["b%2 1 0", "a%1 0 1", "b%1 1 1", "c%x 2 2"])
    listed = [k for ks in t.lemma_index.values() for k in ks]
    assert sorted(listed) == sorted(t.keys)
    assert all(k.lemma == lemma for lemma, ks in t.lemma_index.items() for k in ks)


def test_cosine_examples():
    assert cosine([1, 0], [1, 0]) == 1.0
    assert cosine([1, 0], [0, 1]) == 0.0
    assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(32 / math.sqrt(14 * 77), abs=1e-12)
    assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(0.974631846, abs=1e-9)


def test_cosine_zero_vector_flag():
    assert cosine_with_flag([0, 0], [1, 0]) == (0.0, True)
    assert cosine_with_flag([1, 0], [1, 0]) == (1.0, False)


def test_cosine_length_mismatch():
    with pytest.raises(ValueError):
        cosine([1, 0], [1, 0, 0])


finite = st.floats(-1e3, 1e3, allow_nan=False)
vec3 = arrays(np.float64, 3, elements=finite)


@given(vec3, vec3)
def test_cosine_symmetry(u, v):
    assert cosine(u, v) == cosine(v, u)
    assert -1.0 <= cosine(u, v) <= 1.0


@given(vec3, vec3, st.floats(1e-3, 1e3))
def test_cosine_scale_invariance(u, v, alpha):
    if np.linalg.norm(u) < 1e-3 or np.linalg.norm(v) < 1e-3:
        return
    assert cosine(alpha * u, v) == pytest.approx(cosine(u, v), abs=1e-12)


@given(st.text(min_size=1).filter(lambda s: "%" not in s and s == s.lower()), st.text())
def test_sense_key_round_trip(lemma, sense_id):
    key = SenseKey(lemma, sense_id)
    assert SenseKey.parse(key.render()) == key


def test_senses_of_order_and_unknown():
    t = load_sense_embeddings(["bank%s2 0 1", "bank%s1 1 0"])
    got = senses_of(t, "bank")
    assert [k.sense_id for k, _ in got] == ["s1", "s2"]
    np.testing.assert_array_equal(got[0][1], [1.0, 0.0])
    assert senses_of(t, "river") == []


def test_sense_centroid():
    t = load_sense_embeddings(["x%1 2 0", "x%2 0 2", "y%1 3 4"])
    np.testing.assert_array_equal(sense_centroid(t, "x"), [1.0, 1.0])
    np.testing.assert_array_equal(sense_centroid(t, "y"), [3.0, 4.0])
    assert sense_centroid(t, "z") is None
