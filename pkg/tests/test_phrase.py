import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import rank_formula_rho, spearman_with_ties
from sensebench.embeddings import EmbeddingTable, SenseEmbeddingTable, SenseKey
from sensebench.errors import PairFormatError
from sensebench.phrase import (
    Judgment,
    PhrasePair,
    evaluate_correlation,
    format_table,
    load_pairs,
    score_pair,
    spearman,
)
from sensebench.synthetic import random_sense_table


def test_load_pairs_groups_participants():
    rows = ["p1\tAN\tbig\tdog\tlarge\tcat\t5", "p2\tAN\tbig\tdog\tlarge\tcat\t3"]
    (pair,) = load_pairs(rows)
    assert pair.category == "AN" and pair.phrase1 == ("big", "dog")
    assert [j.score for j in pair.judgments] == [5.0, 3.0]
    assert pair.mean_judgment == 4.0


def test_load_pairs_unknown_category():
    with pytest.raises(PairFormatError, match="line 2.*'XY'"):
        load_pairs(["p1,AN,a,b,c,d,1", "p1,XY,a,b,c,d,1"])


def test_load_pairs_three_distinct():
    rows = [f"p{k},{cat},a{i},b,c,d,{k}" for i, cat in enumerate(["AN", "NN", "VO"]) for k in (1, 2)]
    assert len(load_pairs(rows)) == 3


def test_load_pairs_header_and_original_layout():
    rows = [
        "participant category w1 w2 w3 w4 score",
        "participant56 verbobjects 1 knowledge use influence exercise 5",
        "participant57 compoundnouns 2 tax charge interest rate 2",
    ]
    pairs = load_pairs(rows)
    assert [p.category for p in pairs] == ["VO", "NN"]
    assert pairs[0].phrase2 == ("influence", "exercise")


@pytest.mark.parametrize("row", ["p1,AN,a,b,c,d", "p1,AN,a,b,c,d,x,y,z"])
def test_load_pairs_malformed(row):
    with pytest.raises(PairFormatError):
        load_pairs(["p0,AN,a,b,c,d,1", row])


def test_load_pairs_non_numeric_score():
    with pytest.raises(PairFormatError, match="non-numeric"):
        load_pairs(["p0,AN,a,b,c,d,1", "p1,AN,a,b,c,d,high"])


WT = EmbeddingTable.from_dict({"a": [1, 0], "b": [0, 0], "c": [0, 1], "d": [0, 0]})


def pair(p1, p2, cat="AN", scores=(1.0,)):
    return PhrasePair(cat, p1, p2, [Judgment(f"p{i}", s) for i, s in enumerate(scores)])


def test_score_pair_single():
    assert score_pair(WT, pair(("a", "b"), ("a", "b"))) == 1.0
    assert score_pair(WT, pair(("a", "b"), ("c", "d"))) == 0.0
    assert score_pair(WT, pair(("a", "zzz"), ("c", "d"))) is None


def test_score_pair_modes_on_sense_table():
    t = SenseEmbeddingTable.from_dict(
        {SenseKey("a", "1"): [1, 0], SenseKey("a", "2"): [0, 1], SenseKey("b", "1"): [1, 1]}
    )
    p = pair(("a", "b"), ("b", "b"))
    vals = {m: score_pair(t, p, m) for m in ("max", "min", "mean")}
    assert vals["min"] <= vals["mean"] <= vals["max"]
    with pytest.raises(TypeError):
        score_pair(t, p, "single")
    assert score_pair(t, pair(("a", "q"), ("b", "b")), "max") is None


def test_spearman_examples():
    assert spearman([1, 2, 3], [10, 20, 30]) == 1.0
    assert spearman([1, 2, 3], [3, 2, 1]) == -1.0
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)
    assert rank_formula_rho([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)


def test_spearman_degenerate_and_errors():
    assert math.isnan(spearman([1, 1, 1], [1, 2, 3]))
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        spearman([1], [1])


def test_spearman_ties_against_oracle():
    xs = [1, 2, 2, 3, 3, 3, 7]
    ys = [2, 1, 4, 4, 5, 0, 9]
    assert spearman(xs, ys) == pytest.approx(spearman_with_ties(xs, ys), abs=1e-12)


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=3, max_size=30))
def test_spearman_symmetry_and_monotone_invariance(pts):
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    r = spearman(xs, ys)
    if math.isnan(r):
        return
    assert r == pytest.approx(spearman(ys, xs), abs=1e-12)
    assert r == pytest.approx(spearman([math.exp(x) for x in xs], [y**3 for y in ys]), abs=1e-12)
    assert r == pytest.approx(spearman_with_ties(xs, ys), abs=1e-12)


def _perfect_pairs():
    rng = np.random.default_rng(0)
    vocab = [f"w{i}" for i in range(12)]
    wt = EmbeddingTable.from_dict({w: rng.normal(size=6) for w in vocab})
    pairs = []
    for cat in ("AN", "NN", "VO"):
        for _ in range(8):
            ws = [vocab[i] for i in rng.choice(12, 4, replace=False)]
            pairs.append(pair(tuple(ws[:2]), tuple(ws[2:]), cat))
    for p in pairs:
        s = score_pair(wt, p)
        p.judgments = [Judgment("x", s), Judgment("y", s)]
    return wt, pairs


def test_evaluate_correlation_perfect():
    wt, pairs = _perfect_pairs()
    for per_pair in (False, True):
        rep = evaluate_correlation(wt, pairs, "single", per_pair=per_pair)
        assert rep.rho == pytest.approx({"AN": 1.0, "NN": 1.0, "VO": 1.0})
        assert rep.average == pytest.approx(1.0)
    assert evaluate_correlation(wt, pairs).n_judgments == 48


def test_evaluate_correlation_skips_and_omits(caplog):
    wt, pairs = _perfect_pairs()
    pairs = [p for p in pairs if p.category != "VO"] + [pair(("w1", "zzz"), ("w2", "w3"), "VO")]
    rep = evaluate_correlation(wt, pairs)
    assert rep.skipped_pairs == 1
    assert "VO" not in rep.rho and "VO" in rep.omitted_categories
    assert rep.average == pytest.approx(1.0)
    assert "VO" in caplog.text


def test_multi_sense_modes_in_range_end_to_end():
    words = [f"w{i}" for i in range(10)]
    t = random_sense_table(words, 5, seed=2)
    rng = np.random.default_rng(3)
    pairs = [
        pair(tuple(rng.choice(words, 2)), tuple(rng.choice(words, 2)), cat, scores=rng.integers(1, 8, size=3))
        for cat in ("AN", "NN", "VO")
        for _ in range(10)
    ]
    for per_pair in (False, True):
        for m in ("max", "min", "mean"):
            rep = evaluate_correlation(t, pairs, m, per_pair)
            assert all(-1 <= r <= 1 for r in rep.rho.values())
    for p in pairs:
        assert score_pair(t, p, "min") <= score_pair(t, p, "mean") <= score_pair(t, p, "max")


def test_format_table_layout():
    wt, pairs = _perfect_pairs()
    text = format_table([("word2vec", evaluate_correlation(wt, pairs))])
    header, _, row = text.splitlines()
    assert header.split(" | ")[0].strip() == "Model"
    assert [c.strip() for c in row.split("|")] == ["word2vec", "1.00", "1.00", "1.00", "1.00"]
