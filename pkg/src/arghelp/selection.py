"""Information-gain scoring with an MDL-accepted binary split, and filtering.

Each column is binarised at the cut that maximises information gain over
midpoints between consecutive distinct values.  The cut is kept only if it
passes the Fayyad-Irani MDL test; otherwise the column scores 0.  This is
what makes "positive information gain" a real filter on continuous data.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numba
import numpy as np

from .vectors import AF_FAMILIES, UGR

SELECTION_MIN_DIMS = 10_000
# families the positive-IG filter always applies to
FILTERED_FAMILIES = frozenset((UGR,) + AF_FAMILIES)


@dataclass(frozen=True)
class IgScore:
    dimension: int
    ig: float
    threshold: float | None


@numba.njit(cache=True)
def _entropy(pos, n):
    if n == 0 or pos == 0 or pos == n:
        return 0.0
    p = pos / n
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


@numba.njit(cache=True)
def _ig_columns(values, order, mask, y):
    """Score every column on the rows where ``mask`` is set.

    Column j is given as ``values[j]`` sorted ascending, with ``order[j]``
    holding the matching row indices.
    """
    n_cols, n_rows = values.shape
    ig = np.zeros(n_cols)
    thr = np.full(n_cols, np.nan)
    n = 0
    pos = 0
    for i in range(n_rows):
        if mask[i]:
            n += 1
            pos += y[i]
    k = 2 if 0 < pos < n else 1
    if n < 2 or k == 1:
        return ig, thr
    # m * H(a / m) = xlog(m) - xlog(a) - xlog(m - a), with xlog(t) = t log2 t
    xlog = np.zeros(n + 1)
    for t in range(2, n + 1):
        xlog[t] = t * math.log2(t)
    h_all = _entropy(pos, n)
    log_terms = math.log2(n - 1.0) + math.log2(3.0**k - 2.0)
    for j in range(n_cols):
        if values[j, 0] == values[j, n_rows - 1]:
            continue
        best_cost = np.inf
        best_t = np.nan
        best_left = -1
        best_left_pos = 0
        left = 0
        left_pos = 0
        prev = 0.0
        for r in range(n_rows):
            i = order[j, r]
            if not mask[i]:
                continue
            v = values[j, r]
            if left > 0 and v > prev:
                right = n - left
                right_pos = pos - left_pos
                # n * H(Y | split)
                cost = (
                    xlog[left] - xlog[left_pos] - xlog[left - left_pos]
                    + xlog[right] - xlog[right_pos] - xlog[right - right_pos]
                )
                if cost < best_cost:
                    best_cost = cost
                    best_t = prev + (v - prev) / 2.0
                    best_left = left
                    best_left_pos = left_pos
            left += 1
            left_pos += y[i]
            prev = v
        if best_left < 0:
            continue
        right = n - best_left
        right_pos = pos - best_left_pos
        h1 = _entropy(best_left_pos, best_left)
        h2 = _entropy(right_pos, right)
        gain = h_all - (best_left * h1 + right * h2) / n
        k1 = 2 if 0 < best_left_pos < best_left else 1
        k2 = 2 if 0 < right_pos < right else 1
        # Fayyad-Irani MDL acceptance
        if gain > 0 and gain > (log_terms - (k * h_all - k1 * h1 - k2 * h2)) / n:
            ig[j] = gain
            thr[j] = best_t
    return ig, thr


class SortedColumns:
    """Every column of an (n_rows, n_cols) matrix sorted once.

    Folds over the same matrix reuse one sort; each fold only rescans.
    """

    def __init__(self, x):
        xt = np.ascontiguousarray(np.asarray(x, dtype=float).T)
        self.shape = (xt.shape[1], xt.shape[0])
        self.order = np.argsort(xt, axis=1, kind="stable").astype(np.int32)
        self.values = np.take_along_axis(xt, self.order, axis=1)


def _as_labels(labels) -> np.ndarray:
    y = np.asarray(labels)
    if y.dtype == bool:
        return y.astype(np.int64)
    uniq = np.unique(y)
    if not set(uniq.tolist()) <= {0, 1}:
        if len(uniq) > 2:
            raise ValueError("labels must be binary")
        y = y == uniq[-1]
    return np.asarray(y, dtype=np.int64)


def ig_scores(x, labels, rows=None, sorted_columns: SortedColumns | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Information gain (bits) and chosen cut for every column of ``x``.

    ``rows`` restricts scoring to a subset of rows (e.g. a training fold).
    Pass ``sorted_columns`` to share one sort between many folds; ``x`` may
    then be None.
    """
    cols = sorted_columns if sorted_columns is not None else SortedColumns(x)
    y = _as_labels(labels)
    if cols.shape[0] != len(y):
        raise ValueError(f"matrix rows ({cols.shape[0]}) and labels ({len(y)}) disagree")
    mask = np.ones(len(y), dtype=np.bool_)
    if rows is not None:
        mask[:] = False
        mask[np.asarray(rows, dtype=np.int64)] = True
    if not mask.any():
        raise ValueError("no rows to score")
    if cols.shape[1] == 0:
        return np.zeros(0), np.zeros(0)
    return _ig_columns(cols.values, cols.order, mask, y)


def information_gain(column, labels) -> IgScore:
    col = np.asarray(column, dtype=float)
    y = np.asarray(labels)
    if col.ndim != 1 or len(col) != len(y):
        raise ValueError("column and labels must have equal length")
    if len(col) < 2:
        raise ValueError("information gain needs at least two samples")
    ig, thr = ig_scores(col[:, None], y)
    t = float(thr[0])
    return IgScore(0, float(ig[0]), None if math.isnan(t) else t)


def needs_selection(family: str, dimensionality: int) -> bool:
    return family in FILTERED_FAMILIES or dimensionality > SELECTION_MIN_DIMS


def select_positive(matrix, labels, family: str | None = None, rows=None, sorted_columns=None):
    """Indices of columns with positive information gain.

    Families that the filter does not apply to pass through untouched.
    Returns ``(indices, ig, thresholds)`` restricted to the kept columns.
    """
    shape = sorted_columns.shape if sorted_columns is not None else np.shape(matrix)
    n_rows = shape[0] if rows is None else len(rows)
    if n_rows == 0:
        raise ValueError("cannot select features on an empty training fold")
    if family is not None and not needs_selection(family, shape[1]):
        keep = np.arange(shape[1])
        return keep, np.full(len(keep), np.nan), np.full(len(keep), np.nan)
    ig, thr = ig_scores(matrix, labels, rows=rows, sorted_columns=sorted_columns)
    keep = np.flatnonzero(ig > 0)
    return keep, ig[keep], thr[keep]


# --- manifests and breakdowns ----------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    family: str
    name: str
    ig: float
    threshold: float | None


def format_manifest(entries: Iterable[ManifestEntry]) -> str:
    lines = []
    for e in entries:
        t = "" if e.threshold is None or math.isnan(e.threshold) else repr(e.threshold)
        ig = "" if math.isnan(e.ig) else repr(e.ig)
        lines.append(f"{e.family}\t{e.name}\t{ig}\t{t}")
    return "".join(line + "\n" for line in lines)


def parse_manifest(document: str) -> list[ManifestEntry]:
    out = []
    for lineno, line in enumerate(document.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValueError(f"manifest line {lineno}: expected 4 tab-separated fields")
        fam, name, ig, t = parts
        out.append(ManifestEntry(fam, name, float(ig) if ig else math.nan, float(t) if t else None))
    return out


def feature_kind(name: str) -> str:
    """'sum_ratio', 'mean_ratio', 'ratio' or 'statistic' from a dimension name."""
    kind = name.split(":")[1]
    return kind if kind in ("sum_ratio", "mean_ratio", "ratio") else "statistic"


@dataclass(frozen=True)
class FamilyBreakdown:
    total: int
    family_counts: dict[str, int]
    kind_counts: dict[str, dict[str, int]]

    def share(self, family: str) -> float:
        return self.family_counts.get(family, 0) / self.total

    def kind_share(self, family: str, kind: str) -> float:
        n = self.family_counts.get(family, 0)
        return self.kind_counts.get(family, {}).get(kind, 0) / n if n else 0.0

    def argmax(self) -> str:
        return max(AF_FAMILIES, key=lambda f: (self.family_counts.get(f, 0), -AF_FAMILIES.index(f)))


def family_breakdown(selected: Sequence[tuple[str, str]]) -> FamilyBreakdown:
    """Share of selected argument features per family, from (family, name) pairs."""
    af = [(f, n) for f, n in selected if f in AF_FAMILIES]
    if not af:
        raise ValueError("no argument features selected")
    fam = Counter(f for f, _ in af)
    kinds: dict[str, Counter] = {f: Counter() for f in AF_FAMILIES}
    for f, n in af:
        kinds[f][feature_kind(n)] += 1
    return FamilyBreakdown(
        len(af),
        {f: fam.get(f, 0) for f in AF_FAMILIES},
        {f: dict(kinds[f]) for f in AF_FAMILIES},
    )
