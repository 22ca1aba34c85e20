import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arghelp.corpus import (
    COMPONENT_TYPES,
    ComponentType,
    CorpusFormatError,
    UndefinedLabelError,
    assemble_components,
    corpus_statistics,
    derive_label,
    dump_corpus,
    fleiss_kappa,
    format_statistics,
    majority_vote,
    parse_corpus,
)
from conftest import make_review

C, P, B = ComponentType.Claim, ComponentType.Premise, ComponentType.Background


def record(**over):
    rec = {
        "id": "r1",
        "text": "Great room, but rude staff.",
        "helpful": 3,
        "total": 4,
        "clauses": [
            {"text": "Great room", "labels": "Claim,Claim,Premise"},
            {"text": "but rude staff.", "labels": "Premise,Premise,Premise"},
        ],
    }
    rec.update(over)
    return json.dumps(rec)


def test_component_types_canonical_order():
    assert [t.name for t in COMPONENT_TYPES] == [
        "MajorClaim", "Claim", "Premise", "PSIC", "Background", "Recommendation", "NonArgumentative",
    ]


def test_parse_labels_and_votes():
    (r,) = parse_corpus(record())
    assert r.label is True
    assert r.clauses[0].final_label == C
    assert r.clauses[0].annotator_labels == (C, C, P)
    (r,) = parse_corpus(record(helpful=2))
    assert r.label is False


@pytest.mark.parametrize(
    "line, needle",
    [
        (record(helpful=5), "X=5 exceed"),
        (record(clauses=[{"text": "Great room", "labels": "Clam"}, {"text": "but rude staff.", "labels": "Claim"}]), "'Clam'"),
        ("{not json", "invalid JSON"),
        (record(extra=1), "unexpected ['extra']"),
        (record(total=0), "positive"),
        (record(clauses=[{"text": "Great room", "labels": "Claim"}]), "do not cover"),
        (record(helpful=True), "non-negative integer"),
    ],
)
def test_parse_errors(line, needle):
    with pytest.raises(CorpusFormatError) as exc:
        parse_corpus("\n" + line + "\n")
    assert needle in str(exc.value)
    assert exc.value.line == 2


def test_parse_error_names_record():
    with pytest.raises(CorpusFormatError, match="record 'r1'"):
        parse_corpus(record(helpful=9))


def test_duplicate_ids_and_rater_counts():
    with pytest.raises(CorpusFormatError, match="duplicate id"):
        parse_corpus(record() + "\n" + record())
    other = record(id="r2", clauses=[{"text": "Great room", "labels": "Claim"}, {"text": "but rude staff.", "labels": "Claim"}])
    with pytest.raises(CorpusFormatError, match="annotator labels"):
        parse_corpus(record() + "\n" + other)


def test_round_trip():
    doc = record() + "\n" + record(id="r2", helpful=0)
    reviews = parse_corpus(doc)
    assert parse_corpus(dump_corpus(reviews)) == reviews


def test_derive_label():
    assert derive_label(3, 4) is True
    assert derive_label(74, 100) is False
    assert derive_label(0, 1) is False
    assert derive_label(75, 100) is True
    with pytest.raises(UndefinedLabelError):
        derive_label(0, 0)


@given(st.integers(1, 500), st.data())
def test_derive_label_monotone(y, data):
    x = data.draw(st.integers(0, y - 1))
    assert derive_label(x, y) <= derive_label(x + 1, y)
    assert derive_label(x, y) == (x / y >= 0.75 if (4 * x - 3 * y) != 0 else True)


def test_majority_vote():
    assert majority_vote([C, C, P]) == C
    assert majority_vote([C, C, C]) == C
    assert majority_vote([C, P, B]) == C
    assert majority_vote([B, P]) == P
    with pytest.raises(ValueError):
        majority_vote([])


@given(st.lists(st.sampled_from(COMPONENT_TYPES), min_size=1, max_size=6), st.randoms())
def test_majority_vote_permutation_invariant(labels, rnd):
    shuffled = labels[:]
    rnd.shuffle(shuffled)
    assert majority_vote(shuffled) == majority_vote(labels)


def test_fleiss_unanimous():
    assert fleiss_kappa([[3, 0], [0, 3], [3, 0]]) == 1.0
    assert fleiss_kappa([[0, 3, 0], [0, 0, 3], [3, 0, 0]]) == 1.0


def test_fleiss_hand_computed():
    # P_i = 1, 1/3, 1/3, 1, 1 -> P = 11/15; p = (0.6, 0.4) -> Pe = 0.52; kappa = 4/9
    table = [[3, 0], [2, 1], [1, 2], [0, 3], [3, 0]]
    assert abs(fleiss_kappa(table) - 4 / 9) < 1e-12


def test_fleiss_degenerate_and_errors():
    assert math.isnan(fleiss_kappa([[3, 0], [3, 0]]))
    with pytest.raises(ValueError):
        fleiss_kappa([[3, 0], [2, 0]])
    with pytest.raises(ValueError):
        fleiss_kappa(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        fleiss_kappa([[1, 0]])


def test_fleiss_random_near_zero():
    rng = np.random.default_rng(7)
    votes = rng.integers(0, 3, size=(10_000, 3))
    table = np.stack([(votes == k).sum(axis=1) for k in range(3)], axis=1)
    assert abs(fleiss_kappa(table)) < 0.05


@st.composite
def vote_tables(draw):
    rows = draw(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=2, max_size=8))
    return np.array([[a, min(b, 3 - a), 3 - a - min(b, 3 - a)] for a, b in rows])


@given(vote_tables(), st.randoms())
def test_fleiss_permutation_invariant(table, rnd):
    perm_rows = table[rnd.sample(range(len(table)), len(table))]
    perm_cols = table[:, [2, 0, 1]]
    a, b, c = fleiss_kappa(table), fleiss_kappa(perm_rows), fleiss_kappa(perm_cols)
    assert (math.isnan(a) and math.isnan(b) and math.isnan(c)) or a == b == c


def test_assemble_components():
    r = make_review(["Claim", "Claim", "Premise"])
    merged = assemble_components(r)
    assert [(c.component_type, c.start, c.end) for c in merged] == [(C, 0, 1), (P, 2, 2)]
    assert len(assemble_components(r, merge_adjacent=False)) == 3
    ten = make_review(["Claim"] + ["Premise"] + ["Claim"] * 8)
    assert assemble_components(ten)[1].position == 0.2


def test_component_counts():
    r = make_review(["Claim", "Claim"], texts=["ten words are here in this clause one two three", "five words in this one"])
    (c,) = assemble_components(r)
    assert c.token_count == 15 and c.letter_count == sum(ch.isalpha() for ch in r.clauses[0].clause_text + r.clauses[1].clause_text)


@given(st.lists(st.sampled_from(COMPONENT_TYPES), min_size=1, max_size=12), st.booleans())
def test_components_partition_clauses(labels, merge):
    comps = assemble_components(make_review(labels), merge)
    covered = list(itertools.chain.from_iterable(range(c.start, c.end + 1) for c in comps))
    assert covered == list(range(len(labels)))
    assert all(0 < c.position <= 1 for c in comps)
    assert comps[0].position == 1 / len(labels)


def test_corpus_statistics():
    rows = corpus_statistics([])
    assert [r.count for r in rows] == [0] * 7
    r = make_review(["Claim"] * 3)
    assert corpus_statistics([r])[1].count == 1
    assert corpus_statistics([r], merge_adjacent=False)[1].count == 3
    reviews = [make_review(["Claim", "Premise", "Background"], rid="a"), make_review(["MajorClaim", "Premise"], rid="b")]
    stats = corpus_statistics(reviews)
    used = [s for s in stats if s.count]
    assert all(s.kappa == 1.0 for s in used)
    assert "Component Type" in format_statistics(stats)
