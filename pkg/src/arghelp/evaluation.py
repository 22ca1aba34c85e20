"""Cross-validated experiments, metrics and reports."""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from . import argument, baseline, svm
from .baseline import Lexicon
from .corpus import AnnotatedReview
from .selection import ManifestEntry, SortedColumns, family_breakdown, select_positive
from .textproc import default_stopwords
from .vectors import AF_FAMILIES, AF_POSITION, AF_TOKEN, AF_COMPONENT, AF_LETTER, GALC, INQUIRER, STR, UGR

log = logging.getLogger(__name__)

STANDARD_CONFIGS = ("AF", "STR", "STR+AF", "UGR", "UGR+AF", "GALC", "GALC+AF", "INQUIRER", "INQUIRER+AF")
METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "auc")
_ALIASES = {"AF": AF_FAMILIES, STR: (STR,), UGR: (UGR,), GALC: (GALC,), INQUIRER: (INQUIRER,)}
_ALIASES.update({f: (f,) for f in AF_FAMILIES})


def parse_config(config: str | Sequence[str]) -> tuple[str, ...]:
    """``"UGR+AF"`` -> ('UGR', 'AF-component', ..., 'AF-position'), canonical order."""
    parts = config.split("+") if isinstance(config, str) else list(config)
    fams: set[str] = set()
    for p in parts:
        p = p.strip()
        if p not in _ALIASES:
            raise ValueError(f"unknown feature family {p!r}")
        fams.update(_ALIASES[p])
    if not fams:
        raise ValueError("a configuration needs at least one feature family")
    order = (STR, UGR, GALC, INQUIRER) + AF_FAMILIES
    return tuple(f for f in order if f in fams)


# --- folds -----------------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignments: np.ndarray

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def stratified_folds(labels, k: int = 10, seed: int = 0) -> FoldPlan:
    """Shuffle each class with a seeded generator, then deal round-robin.

    Positives are dealt first and negatives continue the same rotation, so
    fold sizes differ by at most one.
    """
    y = np.asarray(labels, dtype=bool)
    if k < 2:
        raise ValueError("need k >= 2 folds")
    if k > len(y):
        raise ValueError(f"k={k} exceeds the number of reviews ({len(y)})")
    if y.all() or not y.any():
        raise ValueError("both classes need at least one member")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(y)), rng.permutation(np.flatnonzero(~y))])
    assignments = np.empty(len(y), dtype=np.int64)
    assignments[order] = np.arange(len(y)) % k
    return FoldPlan(k, seed, assignments)


# --- metrics ---------------------------------------------------------------


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    per_class: dict = field(default_factory=dict)
    confusion: dict = field(default_factory=dict)

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, m) for m in METRIC_NAMES)


def _class_metrics(y_true: np.ndarray, y_pred: np.ndarray, cls: bool) -> ClassMetrics:
    tp = int(np.sum((y_pred == cls) & (y_true == cls)))
    predicted = int(np.sum(y_pred == cls))
    support = int(np.sum(y_true == cls))
    p = tp / predicted if predicted else 0.0
    r = tp / support if support else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return ClassMetrics(p, r, f, support)


def auc_score(y_true, scores) -> float:
    """Probability a random positive outscores a random negative (ties count 1/2).

    Returns 0.5 when either class is absent.
    """
    y = np.asarray(y_true, dtype=bool)
    s = np.asarray(scores, dtype=float)
    n_pos, n_neg = int(y.sum()), int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        return 0.5
    ranks = rankdata(s)
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def compute_metrics(y_true, y_pred, scores, averaging: str = "weighted") -> MetricsReport:
    """Accuracy, averaged precision/recall/F1 and AUC.

    ``averaging="weighted"`` weights each class by its support; ``"macro"``
    takes the plain mean over classes occurring in ``y_true`` or ``y_pred``.
    """
    yt = np.asarray(y_true, dtype=bool)
    yp = np.asarray(y_pred, dtype=bool)
    sc = np.asarray(scores, dtype=float)
    if not len(yt) == len(yp) == len(sc):
        raise ValueError("y_true, y_pred and scores must have equal length")
    if len(yt) == 0:
        raise ValueError("need at least one example")
    if averaging not in ("weighted", "macro"):
        raise ValueError(f"unknown averaging mode {averaging!r}")
    per = {cls: _class_metrics(yt, yp, cls) for cls in (True, False)}
    present = [cls for cls in (True, False) if per[cls].support or np.any(yp == cls)]
    if averaging == "weighted":
        w = {cls: per[cls].support / len(yt) for cls in present}
    else:
        w = {cls: 1 / len(present) for cls in present}
    avg = {m: sum(w[c] * getattr(per[c], m) for c in present) for m in ("precision", "recall", "f1")}
    confusion = {
        "tp": int(np.sum(yp & yt)),
        "fp": int(np.sum(yp & ~yt)),
        "tn": int(np.sum(~yp & ~yt)),
        "fn": int(np.sum(~yp & yt)),
    }
    return MetricsReport(
        float(np.mean(yt == yp)),
        avg["precision"],
        avg["recall"],
        avg["f1"],
        auc_score(yt, sc),
        {"helpful": per[True], "not-helpful": per[False]},
        confusion,
    )


def mean_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    if not reports:
        raise ValueError("no fold reports to average")
    means = [float(np.mean([getattr(r, m) for r in reports])) for m in METRIC_NAMES]
    confusion = {k: sum(r.confusion[k] for r in reports) for k in reports[0].confusion}
    return MetricsReport(*means, confusion=confusion)


# --- pipeline --------------------------------------------------------------


@dataclass(frozen=True)
class SvmParams:
    kernel: str = "rbf"
    c: float = 1.0
    gamma: float | None = None
    tol: float = 1e-3
    max_kernel_evals: int = 10**7

    def spec(self) -> svm.KernelSpec:
        return svm.KernelSpec(self.kernel, self.gamma)


@dataclass(frozen=True)
class Resources:
    galc: Lexicon
    inquirer: Lexicon
    stopwords: frozenset[str] = field(default_factory=default_stopwords)
    merge_adjacent: bool = True

    @classmethod
    def stubs(cls, merge_adjacent: bool = True) -> "Resources":
        return cls(baseline.stub_lexicon("galc"), baseline.stub_lexicon("inquirer"), merge_adjacent=merge_adjacent)


def _key(rows) -> str:
    return hashlib.sha1(np.asarray(rows, dtype=np.int64).tobytes()).hexdigest()


def _manifest(family, names, keep, ig, thr) -> list[ManifestEntry]:
    return [
        ManifestEntry(family, names[j], g, None if t != t else t)
        for j, g, t in zip(keep.tolist(), ig.tolist(), thr.tolist())
    ]


@dataclass(frozen=True)
class GramBlock:
    """One family's share of the kernel for a fold.

    Features are scaled column by column, so dot products and squared norms
    of a concatenation are sums over families.
    """

    dims: int
    train_dot: np.ndarray  # (n_train, n_train)
    test_dot: np.ndarray  # (n_test, n_train)
    train_sq: np.ndarray
    test_sq: np.ndarray
    manifest: list


class FeatureStore:
    """Feature matrices, per-fold selections and kernel blocks, cached.

    One store serves many configurations over the same corpus, so argument
    features are built, sorted and selected once per fold no matter how
    many configurations include them.
    """

    def __init__(self, reviews: Sequence[AnnotatedReview], resources: Resources):
        self.reviews = list(reviews)
        self.resources = resources
        self.labels = np.array([r.label for r in self.reviews], dtype=bool)
        self._fixed: dict[str, np.ndarray] = {}
        self._sorted: dict[str, SortedColumns] = {}
        self._blocks: dict[tuple, GramBlock] = {}

    def fixed(self, family: str) -> np.ndarray:
        if family not in self._fixed:
            res = self.resources
            if family in AF_FAMILIES:
                self._fixed.update(argument.af_matrices(self.reviews, res.merge_adjacent))
            elif family == STR:
                self._fixed[STR] = baseline.str_matrix(self.reviews)
            elif family == GALC:
                self._fixed[GALC] = baseline.galc_matrix(self.reviews, res.galc)
            elif family == INQUIRER:
                self._fixed[INQUIRER] = baseline.inquirer_matrix(self.reviews, res.inquirer)
            else:
                raise KeyError(family)
        return self._fixed[family]

    def names(self, family: str):
        if family in AF_FAMILIES:
            return argument.SPACES[family].names
        if family == STR:
            return baseline.STR_SPACE.names
        if family == GALC:
            return baseline.galc_space(self.resources.galc).names
        if family == INQUIRER:
            return baseline.inquirer_space(self.resources.inquirer).names
        raise KeyError(family)

    def selected(self, family: str, fit_rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[ManifestEntry]]:
        """(matrix, kept columns, manifest) for one family fit on ``fit_rows``."""
        if family == UGR:
            res = self.resources
            vocab = baseline.build_vocabulary([self.reviews[i] for i in fit_rows], res.stopwords)
            matrix = baseline.ugr_matrix(self.reviews, vocab, res.stopwords)
            keep, ig, thr = select_positive(matrix, self.labels, UGR, rows=fit_rows)
            return matrix, keep, _manifest(UGR, vocab.terms, keep, ig, thr)
        matrix = self.fixed(family)
        if family in AF_FAMILIES:
            if family not in self._sorted:
                self._sorted[family] = SortedColumns(matrix)
            keep, ig, thr = select_positive(
                None, self.labels, family, rows=fit_rows, sorted_columns=self._sorted[family]
            )
        else:
            keep = np.arange(matrix.shape[1])
            ig = thr = np.full(len(keep), np.nan)
        return matrix, keep, _manifest(family, self.names(family), keep, ig, thr)

    def block(self, family: str, fit_rows, train_rows, test_rows) -> GramBlock:
        key = (family, _key(fit_rows), _key(train_rows), _key(test_rows))
        if key not in self._blocks:
            matrix, keep, manifest = self.selected(family, fit_rows)
            x = matrix[:, keep]
            scaling = svm.scale_fit(x[fit_rows])
            xtr = scaling.transform(x[train_rows])
            xte = scaling.transform(x[test_rows])
            self._blocks[key] = GramBlock(
                len(keep),
                xtr @ xtr.T,
                xte @ xtr.T,
                np.einsum("ij,ij->i", xtr, xtr),
                np.einsum("ij,ij->i", xte, xte),
                manifest,
            )
        return self._blocks[key]


@dataclass
class FoldOutcome:
    fold: int
    report: MetricsReport | None
    manifest: list[ManifestEntry]
    n_features: int
    skipped: str | None = None


@dataclass
class ExperimentResult:
    config: str
    families: tuple[str, ...]
    report: MetricsReport
    folds: list[FoldOutcome]

    @property
    def manifests(self) -> list[list[ManifestEntry]]:
        return [f.manifest for f in self.folds if f.skipped is None]


def _kernels(blocks: Sequence[GramBlock], kernel: svm.KernelSpec) -> tuple[np.ndarray, np.ndarray]:
    dims = sum(b.dims for b in blocks)
    train_dot = sum(b.train_dot for b in blocks)
    test_dot = sum(b.test_dot for b in blocks)
    kernel = kernel.resolve(dims)
    if kernel.kind == "linear":
        return train_dot, test_dot
    train_sq = sum(b.train_sq for b in blocks)
    test_sq = sum(b.test_sq for b in blocks)
    d_train = np.maximum(train_sq[:, None] + train_sq[None, :] - 2.0 * train_dot, 0.0)
    d_test = np.maximum(test_sq[:, None] + train_sq[None, :] - 2.0 * test_dot, 0.0)
    return np.exp(-kernel.gamma * d_train), np.exp(-kernel.gamma * d_test)


def run_experiment(
    reviews: Sequence[AnnotatedReview] | FeatureStore,
    config: str | Sequence[str],
    plan: FoldPlan,
    params: SvmParams = SvmParams(),
    averaging: str = "weighted",
    resources: Resources | None = None,
    fit_on_all: bool = False,
) -> ExperimentResult:
    """k-fold cross-validation of one feature configuration.

    Vocabulary, feature selection and scaling are fit on each training
    split only.  ``fit_on_all`` fits them on the whole corpus instead; it
    exists solely to demonstrate the resulting leakage in tests.
    """
    if isinstance(reviews, FeatureStore):
        store = reviews
    else:
        store = FeatureStore(reviews, resources or Resources.stubs())
    families = parse_config(config)
    name = config if isinstance(config, str) else "+".join(config)
    y = store.labels
    if len(plan.assignments) != len(y):
        raise ValueError("fold plan does not match the corpus size")
    all_rows = np.arange(len(y))
    outcomes = []
    for fold in range(plan.k):
        train_rows, test_rows = plan.train_rows(fold), plan.test_rows(fold)
        if y[train_rows].all() or not y[train_rows].any():
            log.warning("%s fold %d: single-class training split, skipped", name, fold)
            outcomes.append(FoldOutcome(fold, None, [], 0, "single-class training split"))
            continue
        fit_rows = all_rows if fit_on_all else train_rows
        blocks = [store.block(f, fit_rows, train_rows, test_rows) for f in families]
        k_train, k_test = _kernels(blocks, params.spec())
        sol = svm.solve_dual(k_train, y[train_rows], params.c, params.tol, params.max_kernel_evals)
        coef = sol.alpha * np.where(y[train_rows], 1.0, -1.0)
        scores = k_test @ coef - sol.rho
        report = compute_metrics(y[test_rows], scores >= 0, scores, averaging)
        manifest = [e for b in blocks for e in b.manifest]
        outcomes.append(FoldOutcome(fold, report, manifest, sum(b.dims for b in blocks)))
    done = [o.report for o in outcomes if o.report is not None]
    return ExperimentResult(name, families, mean_report(done), outcomes)


def run_table(
    reviews: Sequence[AnnotatedReview],
    plan: FoldPlan,
    configs: Sequence[str] = STANDARD_CONFIGS,
    params: SvmParams = SvmParams(),
    averaging: str = "weighted",
    resources: Resources | None = None,
) -> list[ExperimentResult]:
    store = FeatureStore(reviews, resources or Resources.stubs())
    return [run_experiment(store, c, plan, params, averaging) for c in configs]


# --- reports ---------------------------------------------------------------


def format_table(results: Sequence[ExperimentResult]) -> str:
    header = f"{'':<12}{'Accuracy':>10}{'Precision':>11}{'Recall':>9}{'F1-score':>10}{'AUC':>8}"
    lines = [header, "-" * len(header)]
    for res in results:
        r = res.report
        lines.append(
            f"{res.config:<12}{r.accuracy:>10.3f}{r.precision:>11.3f}{r.recall:>9.3f}{r.f1:>10.3f}{r.auc:>8.3f}"
        )
    return "\n".join(lines) + "\n"


def format_csv(results: Sequence[ExperimentResult]) -> str:
    lines = ["Features,Accuracy,Precision,Recall,F1-score,AUC"]
    for res in results:
        lines.append(res.config + "," + ",".join(f"{v:.6f}" for v in res.report.as_row()))
    return "\n".join(lines) + "\n"


_FAMILY_LABELS = {
    AF_COMPONENT: "component-level",
    AF_TOKEN: "token-level",
    AF_LETTER: "letter-level",
    AF_POSITION: "position-level",
}
_KIND_LABELS = {
    "sum_ratio": "ratios of sums",
    "mean_ratio": "ratios of means",
    "statistic": "per-type statistics",
    "ratio": "count ratios",
}


def analysis_report(manifests: Sequence[Sequence[ManifestEntry]]) -> str:
    """Breakdown of positive-IG argument features pooled over fold manifests."""
    selected = [(e.family, e.name) for m in manifests for e in m if e.family in AF_FAMILIES]
    if not selected:
        return "no AF features selected\n"
    bd = family_breakdown(selected)
    lines = [f"positive-IG argument features: {bd.total} (pooled over {len(manifests)} folds)", ""]
    lines.append(f"{'family':<18}{'count':>8}{'share':>9}")
    for fam in AF_FAMILIES:
        lines.append(f"{_FAMILY_LABELS[fam]:<18}{bd.family_counts[fam]:>8d}{bd.share(fam):>9.1%}")
    lines.append("")
    lines.append(f"{'within family':<38}{'share':>9}")
    for fam in AF_FAMILIES:
        for kind, n in sorted(bd.kind_counts[fam].items()):
            label = f"{_FAMILY_LABELS[fam]}: {_KIND_LABELS[kind]}"
            lines.append(f"{label:<38}{bd.kind_share(fam, kind):>9.1%}")
    lines.append("")
    lines.append(f"most represented family: {_FAMILY_LABELS[bd.argmax()]}")
    return "\n".join(lines) + "\n"

