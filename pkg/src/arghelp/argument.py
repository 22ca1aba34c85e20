"""Argument-based features at four granularities.

Every review is summarised by per-type integer aggregates (component counts,
token/letter totals and sums of squares, first-clause indices).  All
features are ratios or moments of those integers, each evaluated as a single
correctly rounded division of exact integers.  That keeps results
independent of component order and of summation order.

Layouts (canonical type order MajorClaim .. NonArgumentative):

* component level: 16002 ratios count(A)/count(B) over ordered pairs of
  distinct non-empty type subsets, A-major.
* token / letter level: 7 x (total, min, max, mean, variance), then the
  16002 sum ratios, then the 16002 mean ratios.
* position level: 7 x (min, max, mean, variance, sum), then the 16002
  position-sum ratios, then the 16002 position-mean ratios.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .corpus import COMPONENT_TYPES, AnnotatedReview, ArgumentComponent, assemble_components
from .vectors import (
    AF_COMPONENT,
    AF_FAMILIES,
    AF_LETTER,
    AF_POSITION,
    AF_TOKEN,
    FeatureSpace,
    FeatureVector,
    LazyNames,
)

N_TYPES = len(COMPONENT_TYPES)
N_SUBSETS = 2**N_TYPES - 1
N_PAIRS = N_SUBSETS * (N_SUBSETS - 1)
N_TYPE_STATS = 5 * N_TYPES
COMPONENT_DIM = N_PAIRS
GRANULAR_DIM = N_TYPE_STATS + 2 * N_PAIRS
TOTAL_DIM = COMPONENT_DIM + 3 * GRANULAR_DIM

AMOUNT_STATS = ("total", "min", "max", "mean", "variance")
POSITION_STATS = ("min", "max", "mean", "variance", "sum")


@dataclass(frozen=True)
class ComponentSubset:
    """Non-empty set of component types; ``index`` is its 7-bit mask."""

    index: int

    def __post_init__(self):
        if not 1 <= self.index <= N_SUBSETS:
            raise ValueError(f"subset index must lie in [1, {N_SUBSETS}]")

    @property
    def members(self) -> tuple:
        return tuple(t for t in COMPONENT_TYPES if self.index >> int(t) & 1)

    def __contains__(self, t) -> bool:
        return bool(self.index >> int(t) & 1)

    @property
    def name(self) -> str:
        return "+".join(t.name for t in self.members)


def enumerate_subsets() -> list[ComponentSubset]:
    return [ComponentSubset(i) for i in range(1, N_SUBSETS + 1)]


@lru_cache(maxsize=None)
def subset_masks() -> np.ndarray:
    """(127, 7) int64 membership matrix; row i is subset index i + 1."""
    idx = np.arange(1, N_SUBSETS + 1)[:, None]
    return ((idx >> np.arange(N_TYPES)[None, :]) & 1).astype(np.int64)


@lru_cache(maxsize=None)
def subset_pairs() -> tuple[np.ndarray, np.ndarray]:
    """Row positions (into ``subset_masks``) of every ordered pair A != B."""
    a, b = np.meshgrid(np.arange(N_SUBSETS), np.arange(N_SUBSETS), indexing="ij")
    keep = a != b
    return a[keep], b[keep]


def pair_of(dim: int) -> tuple[ComponentSubset, ComponentSubset]:
    """Subsets (A, B) behind pair dimension ``dim`` in [0, 16002)."""
    a, r = divmod(dim, N_SUBSETS - 1)
    b = r if r < a else r + 1
    return ComponentSubset(a + 1), ComponentSubset(b + 1)


def pair_index(a: ComponentSubset, b: ComponentSubset) -> int:
    if a.index == b.index:
        raise ValueError("pairs of identical subsets are not features")
    ai, bi = a.index - 1, b.index - 1
    return ai * (N_SUBSETS - 1) + (bi if bi < ai else bi - 1)


def safe_ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator != 0 else 0.0


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den != 0)
    return out


# --- names -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _subset_names() -> tuple[str, ...]:
    return tuple(s.name for s in enumerate_subsets())


def _pair_name(dim: int) -> str:
    a, r = divmod(dim, N_SUBSETS - 1)
    b = r if r < a else r + 1
    names = _subset_names()
    return f"{names[a]}/{names[b]}"


def _granular_namer(prefix: str, stats: Sequence[str]):
    def name(i: int) -> str:
        if i < N_TYPE_STATS:
            t, s = divmod(i, 5)
            return f"{prefix}:{stats[s]}:{COMPONENT_TYPES[t].name}"
        block, dim = divmod(i - N_TYPE_STATS, N_PAIRS)
        kind = "sum_ratio" if block == 0 else "mean_ratio"
        return f"{prefix}:{kind}:{_pair_name(dim)}"

    return name


SPACES = {
    AF_COMPONENT: FeatureSpace(AF_COMPONENT, LazyNames(COMPONENT_DIM, lambda i: f"component:ratio:{_pair_name(i)}")),
    AF_TOKEN: FeatureSpace(AF_TOKEN, LazyNames(GRANULAR_DIM, _granular_namer("token", AMOUNT_STATS))),
    AF_LETTER: FeatureSpace(AF_LETTER, LazyNames(GRANULAR_DIM, _granular_namer("letter", AMOUNT_STATS))),
    AF_POSITION: FeatureSpace(AF_POSITION, LazyNames(GRANULAR_DIM, _granular_namer("position", POSITION_STATS))),
}


def ratio_kind(family: str, dim: int) -> str:
    """'ratio' for component level; otherwise 'statistic', 'sum_ratio' or 'mean_ratio'."""
    if family == AF_COMPONENT:
        return "ratio"
    if dim < N_TYPE_STATS:
        return "statistic"
    return "sum_ratio" if dim < N_TYPE_STATS + N_PAIRS else "mean_ratio"


# --- aggregates ------------------------------------------------------------


@dataclass
class TypeAggregates:
    """Integer per-type aggregates for a batch of reviews, each (n_reviews, 7)."""

    count: np.ndarray
    tok_sum: np.ndarray
    tok_sq: np.ndarray
    tok_min: np.ndarray
    tok_max: np.ndarray
    let_sum: np.ndarray
    let_sq: np.ndarray
    let_min: np.ndarray
    let_max: np.ndarray
    pos_sum: np.ndarray
    pos_sq: np.ndarray
    pos_min: np.ndarray
    pos_max: np.ndarray
    total_clauses: np.ndarray  # (n_reviews,)

    @classmethod
    def from_components(cls, batch: Sequence[Sequence[ArgumentComponent]], total_clauses: Sequence[int]):
        n = len(batch)
        arrays = {name: np.zeros((n, N_TYPES), dtype=np.int64) for name in cls.__dataclass_fields__}
        arrays["total_clauses"] = np.asarray(total_clauses, dtype=np.int64).reshape(n)
        for r, comps in enumerate(batch):
            for c in comps:
                t = int(c.component_type)
                first = c.start + 1
                for key, v in (("tok", c.token_count), ("let", c.letter_count), ("pos", first)):
                    if arrays["count"][r, t] == 0:
                        arrays[f"{key}_min"][r, t] = v
                        arrays[f"{key}_max"][r, t] = v
                    else:
                        arrays[f"{key}_min"][r, t] = min(arrays[f"{key}_min"][r, t], v)
                        arrays[f"{key}_max"][r, t] = max(arrays[f"{key}_max"][r, t], v)
                    arrays[f"{key}_sum"][r, t] += v
                    arrays[f"{key}_sq"][r, t] += v * v
                arrays["count"][r, t] += 1
        return cls(**arrays)


def _check_positions(agg: TypeAggregates) -> None:
    empty = (agg.total_clauses <= 0) & (agg.count.sum(axis=1) > 0)
    if empty.any():
        raise ValueError("position features need total_clauses > 0")


# --- extractors (batch) ----------------------------------------------------


def _pair_block(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    a, b = subset_pairs()
    return _ratio(num[:, a].astype(float), den[:, b].astype(float))


def component_matrix(agg: TypeAggregates) -> np.ndarray:
    counts = agg.count @ subset_masks().T
    return _pair_block(counts, counts)


def _amount_matrix(agg: TypeAggregates, key: str) -> np.ndarray:
    c = agg.count
    s, sq = getattr(agg, f"{key}_sum"), getattr(agg, f"{key}_sq")
    mn, mx = getattr(agg, f"{key}_min"), getattr(agg, f"{key}_max")
    stats = np.stack(
        [s.astype(float), mn.astype(float), mx.astype(float), _ratio(s, c), _ratio(c * sq - s * s, c * c)],
        axis=2,
    ).reshape(len(c), N_TYPE_STATS)
    masks = subset_masks().T
    cs, ss = c @ masks, s @ masks
    a, b = subset_pairs()
    sums = _ratio(ss[:, a].astype(float), ss[:, b].astype(float))
    # mean(A)/mean(B) = (sum_A * count_B) / (sum_B * count_A)
    means = _ratio((ss[:, a] * cs[:, b]).astype(float), (ss[:, b] * cs[:, a]).astype(float))
    return np.concatenate([stats, sums, means], axis=1)


def token_matrix(agg: TypeAggregates) -> np.ndarray:
    return _amount_matrix(agg, "tok")


def letter_matrix(agg: TypeAggregates) -> np.ndarray:
    return _amount_matrix(agg, "let")


def position_matrix(agg: TypeAggregates) -> np.ndarray:
    _check_positions(agg)
    c = agg.count
    n = agg.total_clauses[:, None]
    s, sq = agg.pos_sum, agg.pos_sq
    stats = np.stack(
        [
            _ratio(agg.pos_min, n),
            _ratio(agg.pos_max, n),
            _ratio(s, c * n),
            _ratio(c * sq - s * s, c * c * n * n),
            _ratio(s, n),
        ],
        axis=2,
    ).reshape(len(c), N_TYPE_STATS)
    masks = subset_masks().T
    cs, ss = c @ masks, s @ masks
    a, b = subset_pairs()
    # the clause total cancels in both ratios
    sums = _ratio(ss[:, a].astype(float), ss[:, b].astype(float))
    means = _ratio((ss[:, a] * cs[:, b]).astype(float), (ss[:, b] * cs[:, a]).astype(float))
    return np.concatenate([stats, sums, means], axis=1)


_MATRIX_FNS = {
    AF_COMPONENT: component_matrix,
    AF_TOKEN: token_matrix,
    AF_LETTER: letter_matrix,
    AF_POSITION: position_matrix,
}


def af_matrices(
    reviews: Sequence[AnnotatedReview], merge_adjacent: bool = True, chunk: int = 64
) -> dict[str, np.ndarray]:
    """Dense per-family argument feature matrices for a batch of reviews."""
    out = {f: np.empty((len(reviews), SPACES[f].size)) for f in AF_FAMILIES}
    for lo in range(0, len(reviews), chunk):
        part = reviews[lo : lo + chunk]
        agg = TypeAggregates.from_components(
            [assemble_components(r, merge_adjacent) for r in part], [len(r.clauses) for r in part]
        )
        for f in AF_FAMILIES:
            out[f][lo : lo + len(part)] = _MATRIX_FNS[f](agg)
    return out


# --- extractors (single review) --------------------------------------------


def _single(family: str, components: Sequence[ArgumentComponent], total_clauses: int) -> FeatureVector:
    agg = TypeAggregates.from_components([components], [total_clauses])
    return FeatureVector.from_dense(SPACES[family], _MATRIX_FNS[family](agg)[0])


def _clause_total(components: Sequence[ArgumentComponent]) -> int:
    return components[0].total_clauses if components else 0


def component_level(components: Sequence[ArgumentComponent]) -> FeatureVector:
    return _single(AF_COMPONENT, components, _clause_total(components))


def token_level(components: Sequence[ArgumentComponent]) -> FeatureVector:
    return _single(AF_TOKEN, components, _clause_total(components))


def letter_level(components: Sequence[ArgumentComponent]) -> FeatureVector:
    return _single(AF_LETTER, components, _clause_total(components))


def position_level(components: Sequence[ArgumentComponent], total_clauses: int) -> FeatureVector:
    if total_clauses <= 0:
        raise ValueError("position features need total_clauses > 0")
    return _single(AF_POSITION, components, total_clauses)


AF_SPACE = FeatureSpace(
    "AF",
    LazyNames(
        TOTAL_DIM,
        lambda i: SPACES[family_of(i)[0]].names[family_of(i)[1]],
    ),
)

_OFFSETS = np.cumsum([0] + [SPACES[f].size for f in AF_FAMILIES])


def family_of(dim: int) -> tuple[str, int]:
    """Map an index of the concatenated AF vector to (family, local index)."""
    k = int(np.searchsorted(_OFFSETS, dim, side="right")) - 1
    if not 0 <= k < len(AF_FAMILIES):
        raise IndexError(dim)
    return AF_FAMILIES[k], dim - int(_OFFSETS[k])


def extract_all(review: AnnotatedReview, merge_adjacent: bool = True) -> FeatureVector:
    """All four granularities concatenated: component | token | letter | position."""
    mats = af_matrices([review], merge_adjacent)
    row = np.concatenate([mats[f][0] for f in AF_FAMILIES])
    return FeatureVector.from_dense(AF_SPACE, row)
