import numpy as np
import pytest

from arghelp.corpus import ComponentType, corpus_statistics, dump_corpus, parse_corpus
from arghelp.synth import InfeasibleSpecError, SyntheticSpec, generate


@pytest.mark.parametrize("planted", ["token", "letter", "component", "position"])
def test_round_trip(planted):
    reviews = generate(SyntheticSpec(seed=1, reviews=30, planted=planted))
    assert parse_corpus(dump_corpus(reviews)) == reviews
    assert all(6 <= len(r.clauses) <= 14 for r in reviews)


def test_deterministic():
    a = dump_corpus(generate(SyntheticSpec(seed=5, reviews=20)))
    b = dump_corpus(generate(SyntheticSpec(seed=5, reviews=20)))
    assert a == b
    assert a != dump_corpus(generate(SyntheticSpec(seed=6, reviews=20)))


def test_noise_free_annotators_agree():
    reviews = generate(SyntheticSpec(seed=2, reviews=40, annotator_noise=0.0))
    assert all(s.kappa == 1.0 for s in corpus_statistics(reviews))


def test_label_balance_and_votes():
    reviews = generate(SyntheticSpec(seed=3, reviews=300))
    share = np.mean([r.label for r in reviews])
    assert 0.35 < share < 0.65
    assert all(0 <= r.helpful_votes <= r.total_votes for r in reviews)


def test_planted_token_signal():
    reviews = generate(SyntheticSpec(seed=4, reviews=300, signal=1.0))
    from arghelp.corpus import assemble_components

    def premise_share(r):
        comps = assemble_components(r)
        prem = sum(c.token_count for c in comps if c.component_type in (ComponentType.Premise, ComponentType.PSIC))
        return prem / sum(c.token_count for c in comps)

    pos = np.mean([premise_share(r) for r in reviews if r.label])
    neg = np.mean([premise_share(r) for r in reviews if not r.label])
    assert pos > neg


@pytest.mark.parametrize(
    "kwargs",
    [
        {"signal": 1.5},
        {"clause_range": (1, 3)},
        {"label_probs": {ComponentType.Claim: 0.5}},
        {"planted": "nothing"},
        {"annotator_noise": -0.1},
        {"reviews": 0},
    ],
)
def test_infeasible(kwargs):
    with pytest.raises(InfeasibleSpecError):
        generate(SyntheticSpec(**kwargs))
