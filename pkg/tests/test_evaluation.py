import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arghelp import evaluation as ev
from arghelp.corpus import AnnotatedReview, ClauseAnnotation, ComponentType
from arghelp.selection import ManifestEntry
from arghelp.synth import SyntheticSpec, generate


def test_parse_config():
    assert ev.parse_config("STR") == ("STR",)
    assert ev.parse_config("AF+UGR") == ("UGR", "AF-component", "AF-token", "AF-letter", "AF-position")
    assert ev.parse_config(["AF-token", "STR"]) == ("STR", "AF-token")
    with pytest.raises(ValueError):
        ev.parse_config("FOO")


def test_folds_examples():
    y = [True] * 6 + [False] * 4
    plan = ev.stratified_folds(y, 10, seed=1)
    assert sorted(np.bincount(plan.assignments).tolist()) == [1] * 10
    y = np.array([True] * 60 + [False] * 40)
    plan = ev.stratified_folds(y, 10, seed=3)
    for k in range(10):
        rows = plan.test_rows(k)
        assert y[rows].sum() == 6 and (~y[rows]).sum() == 4
    again = ev.stratified_folds(y, 10, seed=3)
    assert np.array_equal(plan.assignments, again.assignments)
    with pytest.raises(ValueError):
        ev.stratified_folds([True, False], 3)
    with pytest.raises(ValueError):
        ev.stratified_folds([True, True, True], 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 60), st.integers(1, 60), st.integers(2, 10), st.integers(0, 100))
def test_fold_balance(pos, neg, k, seed):
    y = np.array([True] * pos + [False] * neg)
    if k > len(y):
        return
    plan = ev.stratified_folds(y, k, seed)
    sizes = np.bincount(plan.assignments, minlength=k)
    assert sizes.max() - sizes.min() <= 1
    for cls in (True, False):
        per = np.bincount(plan.assignments[y == cls], minlength=k)
        assert per.max() - per.min() <= 1


def test_majority_predictor_closed_form():
    y = np.array([True] * 60 + [False] * 40)
    r = ev.compute_metrics(y, np.ones(100, bool), np.zeros(100))
    assert r.as_row() == pytest.approx((0.6, 0.36, 0.6, 0.45, 0.5), abs=1e-12)


def test_perfect_predictions():
    y = np.array([True, False, True, False])
    r = ev.compute_metrics(y, y, y.astype(float))
    assert r.as_row() == (1.0, 1.0, 1.0, 1.0, 1.0)
    assert r.confusion == {"tp": 2, "fp": 0, "tn": 2, "fn": 0}


def test_auc_hand_example():
    assert ev.auc_score([True, False, True, False], [0.9, 0.8, 0.3, 0.1]) == 0.75
    assert ev.auc_score([True, False], [0.5, 0.5]) == 0.5
    assert ev.auc_score([True, True], [0.1, 0.2]) == 0.5


def test_macro_averaging():
    y = np.array([True] * 60 + [False] * 40)
    r = ev.compute_metrics(y, np.ones(100, bool), np.zeros(100), averaging="macro")
    assert r.precision == pytest.approx(0.3) and r.recall == pytest.approx(0.5) and r.f1 == pytest.approx(0.375)
    with pytest.raises(ValueError):
        ev.compute_metrics(y, y, y, averaging="micro")
    with pytest.raises(ValueError):
        ev.compute_metrics(y, y[:-1], y)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.booleans(), st.integers(-20, 20)), min_size=1, max_size=30), st.randoms())
def test_metric_properties(rows, rnd):
    yt, yp, sc = (np.array(c) for c in zip(*rows))
    r = ev.compute_metrics(yt, yp, sc)
    assert r.recall == pytest.approx(r.accuracy)
    assert all(0 <= v <= 1 for v in r.as_row())
    perm = rnd.sample(range(len(rows)), len(rows))
    assert ev.compute_metrics(yt[perm], yp[perm], sc[perm]).as_row() == pytest.approx(r.as_row())
    assert ev.auc_score(yt, np.exp(sc / 4) * 3 + 1) == pytest.approx(r.auc)


def review(i, helpful, text):
    clause = ClauseAnnotation.from_labels(text, [ComponentType.Claim, ComponentType.Claim])
    return AnnotatedReview(f"r{i}", text, (clause,), 4 if helpful else 0, 4)


def test_planted_structural_feature_gives_perfect_folds():
    reviews = [review(i, i % 2 == 0, "wow!!!!" if i % 2 == 0 else "calm words here") for i in range(40)]
    plan = ev.stratified_folds([r.label for r in reviews], 5, 0)
    res = ev.run_experiment(reviews, "STR", plan)
    assert res.report.accuracy == 1.0
    assert all(f.report.accuracy == 1.0 for f in res.folds)
    assert [e.name for e in res.folds[0].manifest] == list(ev.baseline.STR_SPACE.names)


def test_uninformative_structure_auc_near_half():
    reviews = generate(SyntheticSpec(seed=11, reviews=200, signal=0.0))
    plan = ev.stratified_folds([r.label for r in reviews], 10, 0)
    assert abs(ev.run_experiment(reviews, "STR", plan).report.auc - 0.5) <= 0.1


def test_single_class_fold_skipped(caplog):
    reviews = [review(i, i < 2, "some words" * (i + 1)) for i in range(6)]
    plan = ev.FoldPlan(3, 0, np.array([0, 0, 1, 1, 2, 2]))
    res = ev.run_experiment(reviews, "STR", plan)
    assert res.folds[0].skipped and res.folds[1].skipped is None
    assert len(res.manifests) == 2
    assert "single-class" in caplog.text


def test_fold_local_vocabulary():
    reviews = generate(SyntheticSpec(seed=2, reviews=60))
    plan = ev.stratified_folds([r.label for r in reviews], 3, 0)
    store = ev.FeatureStore(reviews, ev.Resources.stubs())
    fit = plan.train_rows(0)
    matrix, keep, manifest = store.selected("UGR", fit)
    vocab = ev.baseline.build_vocabulary([reviews[i] for i in fit])
    assert matrix.shape[1] == len(vocab.terms)


def test_reports():
    rep = ev.MetricsReport(0.6, 0.36, 0.6, 0.45, 0.5)
    res = [ev.ExperimentResult("STR", ("STR",), rep, [])]
    assert ev.format_csv(res) == "Features,Accuracy,Precision,Recall,F1-score,AUC\nSTR,0.600000,0.360000,0.600000,0.450000,0.500000\n"
    assert "0.360" in ev.format_table(res)
    assert ev.analysis_report([[]]) == "no AF features selected\n"
    one = [[ManifestEntry("AF-letter", "letter:sum_ratio:Claim/Premise", 0.1, 1.0)]]
    text = ev.analysis_report(one)
    assert "letter-level             1   100.0%" in text
    assert text.rstrip().endswith("most represented family: letter-level")


def test_table_order_and_determinism():
    reviews = generate(SyntheticSpec(seed=4, reviews=80))
    plan = ev.stratified_folds([r.label for r in reviews], 4, 0)
    a = ev.run_table(reviews, plan)
    b = ev.run_table(reviews, plan)
    assert [r.config for r in a] == list(ev.STANDARD_CONFIGS)
    assert ev.format_csv(a) == ev.format_csv(b)
