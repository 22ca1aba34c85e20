from hypothesis import given, strategies as st

from arghelp.textproc import (
    letter_count,
    load_stopwords,
    parse_stopwords,
    segment,
    segment_clauses,
    segment_sentences,
    tokenize,
)


def surfaces(text):
    return [t.surface for t in tokenize(text)]


def test_sentences():
    assert segment_sentences("Great stay. Would return!") == ["Great stay.", "Would return!"]
    assert segment_sentences("") == []
    assert segment_sentences("No terminal punctuation") == ["No terminal punctuation"]
    assert len(segment_sentences("Why? Because! Fine.")) == 3


def test_clauses():
    assert len(segment_clauses("The staff were amazing, they went out of their way to help us")) == 2
    assert segment_clauses("Nice room") == ["Nice room"]
    assert segment_clauses("a, , b") == ["a", "b"]
    assert segment_clauses("one; two: three \u2014 four") == ["one", "two", "three", "four"]


def test_tokenize():
    assert surfaces("The Staff were AMAZING") == ["the", "staff", "were", "amazing"]
    assert surfaces("") == []
    assert surfaces("don't") == ["don", "t"]
    assert surfaces("room 101") == ["room", "101"]
    toks = tokenize("the pool", frozenset({"the"}))
    assert [t.is_stopword for t in toks] == [True, False]


def test_letter_count():
    assert letter_count("abc, def!") == 6
    assert letter_count("123") == 0
    assert letter_count("The staff") == 8


def test_stopword_file(tmp_path):
    assert parse_stopwords("# comment\nThe\n\nand  # trailing\n") == frozenset({"the", "and"})
    p = tmp_path / "stop.txt"
    p.write_text("foo\nbar\n", "utf-8")
    assert load_stopwords(p) == {"foo", "bar"}
    assert "the" in load_stopwords(None)


def test_segment_structure():
    seg = segment("Nice room, great view. Bad food!")
    assert seg.sentences == ["Nice room, great view.", "Bad food!"]
    assert seg.clauses == ["Nice room", "great view.", "Bad food!"]
    assert len(seg.tokens) == 6


text = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=60)


@given(text)
def test_tokenize_case_idempotent(s):
    assert surfaces(s.lower()) == surfaces(s)
    assert all(t and not any(c.isspace() for c in t) for t in surfaces(s))


@given(text, text)
def test_letter_count_additive(a, b):
    assert letter_count(a + b) == letter_count(a) + letter_count(b)


@given(st.lists(st.text(alphabet="abc xyz", min_size=1, max_size=12), min_size=1, max_size=5))
def test_clause_split_preserves_tokens(parts):
    sentence = ", ".join(parts)
    assert sum(len(surfaces(c)) for c in segment_clauses(sentence)) == len(surfaces(sentence))
