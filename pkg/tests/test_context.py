from collections import Counter

import pytest
from hypothesis import given, strategies as st

from sensebench.context import (
    AnnotatedSentence,
    extract_bow_window,
    extract_dep_context,
    filter_stopwords,
    load_stopwords,
    read_conllu,
    sentence_from_text,
    tokenize,
)
from sensebench.errors import ConllFormatError, DataError


def sent(tokens, target, **kw):
    return AnnotatedSentence(tuple(tokens), target, **kw)


def test_filter_stopwords_basic():
    out = filter_stopwords(sent(["the", "black", "dog"], 1), {"the"})
    assert out.tokens == ("black", "dog") and out.target_index == 0


def test_filter_stopwords_identity():
    s = sent(["black", "dog"], 0)
    assert filter_stopwords(s, {"the"}) is s


def test_filter_stopwords_target_exempt():
    out = filter_stopwords(sent(["the", "be", "a", "dog", "is"], 1), {"the", "a", "be", "is"})
    assert out.tokens == ("be", "dog") and out.target == "be"


def test_filter_stopwords_drops_dependencies():
    s = sent(["the", "dog"], 1, dep_heads=(2, 0), lemmas=("the", "dog"))
    out = filter_stopwords(s, {"the"})
    assert out.dep_heads is None and out.lemmas == ("dog",)


words = st.lists(st.sampled_from(["a", "the", "of", "x", "y", "z"]), min_size=1, max_size=12)


@given(words, st.data())
def test_filter_idempotent_and_preserves_target(tokens, data):
    t = data.draw(st.integers(0, len(tokens) - 1))
    stops = {"a", "the", "of", "x"}
    s = sent(tokens, t)
    once = filter_stopwords(s, stops)
    assert once.target == tokens[t]
    assert filter_stopwords(once, stops) == once


def test_bow_window_example():
    w = extract_bow_window(sent(["big", "black", "dog", "barked"], 1), 2)
    assert w.words == ("big", "dog", "barked")
    assert w.kind == "bow" and w.radius == 2


def test_bow_window_boundary():
    assert extract_bow_window(sent(["x", "y"], 0), 1).words == ("y",)


def test_bow_window_single_token():
    w = extract_bow_window(sent(["x"], 0), 4)
    assert w.words == () and w.is_empty


def test_bow_window_keeps_other_occurrences():
    assert extract_bow_window(sent(["dog", "dog", "dog"], 1), 1).words == ("dog", "dog")


@given(words, st.data())
def test_window_size_and_monotonicity(tokens, data):
    t = data.draw(st.integers(0, len(tokens) - 1))
    s = sent(tokens, t)
    prev = Counter()
    for r in (1, 2, 4):
        w = Counter(extract_bow_window(s, r).words)
        assert sum(w.values()) <= 2 * r
        assert not prev - w
        prev = w


def test_dep_context_head_and_dependents():
    # d1 -> t, t -> h, d2 -> t
    s = sent(["d1", "t", "h", "d2"], 1, dep_heads=(2, 3, 0, 2))
    assert extract_dep_context(s).words == ("d1", "h", "d2")


def test_dep_context_root_without_dependents():
    s = sent(["a", "t"], 1, dep_heads=(0, 0))
    assert extract_dep_context(s).words == ()


def test_dep_context_chain():
    # a <- b <- c with heads [2, 3, 0]; target b
    s = sent(["a", "b", "c"], 1, dep_heads=(2, 3, 0))
    assert extract_dep_context(s).words == ("a", "c")


def test_dep_context_requires_heads():
    with pytest.raises(DataError):
        extract_dep_context(sent(["a"], 0))


CONLL = """# sent_id = 1
1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_
2\tDog\tdog\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\tbarked\tbark\tVERB\tVBD\t_\t0\troot\t_\t_

1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_
1\tdo\tdo\tAUX\tVBP\t_\t3\taux\t_\t_
2\tn't\tnot\tPART\tRB\t_\t3\tadvmod\t_\t_
3\tgo\tgo\tVERB\tVB\t_\t0\troot\t_\t_
"""


def test_read_conllu():
    sents = read_conllu(CONLL.splitlines(keepends=True))
    assert len(sents) == 2
    assert sents[0].tokens == ("the", "dog", "barked")
    assert sents[0].lemmas == ("the", "dog", "bark")
    assert sents[0].dep_heads == (2, 3, 0)
    assert sents[0].dep_labels == ("det", "nsubj", "root")
    assert sents[1].tokens == ("do", "n't", "go")


def test_read_conllu_bad_columns():
    with pytest.raises(ConllFormatError, match="line 2"):
        read_conllu(["1\ta\ta\tX\tX\t_\t0\troot\t_\t_\n", "2\tb\tb\tX\tX\t_\t1\tdep\t_\n"])


def test_read_conllu_bad_head():
    with pytest.raises(ConllFormatError, match="non-integer head"):
        read_conllu(["1\ta\ta\tX\tX\t_\tx\troot\t_\t_\n"])


def test_read_conllu_head_out_of_range():
    with pytest.raises(ConllFormatError):
        read_conllu(["1\ta\ta\tX\tX\t_\t5\troot\t_\t_\n"])


def test_tokenize_and_locate():
    assert tokenize("Black coffee, please!") == ["black", "coffee", ",", "please", "!"]
    s = sentence_from_text("She sipped hot, black coffee.", "black")
    assert s.target == "black" and s.target_index == 4
    assert sentence_from_text("no target here", "black") is None


def test_annotated_sentence_invariants():
    with pytest.raises(DataError):
        sent(["a"], 1)
    with pytest.raises(DataError):
        sent(["a", "b"], 0, lemmas=("a",))
    with pytest.raises(DataError):
        sent(["a", "b"], 0, dep_heads=(3, 0))


def test_bundled_stopwords():
    stops = load_stopwords()
    assert {"the", "of", "and", ","} <= stops
    assert "dog" not in stops


def test_custom_stopwords(tmp_path):
    p = tmp_path / "stops.txt"
    p.write_text("# comment\nFoo\n\nbar\n")
    assert load_stopwords(p) == {"foo", "bar"}
