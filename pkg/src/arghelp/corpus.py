"""Annotated review corpus: data model, parsing, label aggregation, agreement.

Corpus files are JSON Lines; see ``docs/corpus_format.md`` for the grammar.
"""
from __future__ import annotations

import enum
import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .textproc import letter_count, token_strings

HELPFUL_RATIO = Fraction(3, 4)


class ComponentType(enum.IntEnum):
    """The seven argument component types, in canonical order.

    The integer value doubles as the bit position used when enumerating
    subsets of types.
    """

    MajorClaim = 0
    Claim = 1
    Premise = 2
    PSIC = 3
    Background = 4
    Recommendation = 5
    NonArgumentative = 6

    @classmethod
    def parse(cls, name: str) -> "ComponentType":
        try:
            return cls[name]
        except KeyError:
            raise ValueError(f"unknown component type {name!r}") from None


COMPONENT_TYPES: tuple[ComponentType, ...] = tuple(ComponentType)


class CorpusFormatError(ValueError):
    """Raised for a nonconforming corpus file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None, record_id: str | None = None):
        self.line = line
        self.record_id = record_id
        where = []
        if line is not None:
            where.append(f"line {line}")
        if record_id is not None:
            where.append(f"record {record_id!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UndefinedLabelError(ValueError):
    pass


@dataclass(frozen=True)
class ClauseAnnotation:
    clause_text: str
    annotator_labels: tuple[ComponentType, ...]
    final_label: ComponentType

    @classmethod
    def from_labels(cls, text: str, labels: Sequence[ComponentType]) -> "ClauseAnnotation":
        labels = tuple(labels)
        return cls(text, labels, majority_vote(labels))


@dataclass(frozen=True)
class AnnotatedReview:
    id: str
    text: str
    clauses: tuple[ClauseAnnotation, ...]
    helpful_votes: int
    total_votes: int

    def __post_init__(self):
        if self.helpful_votes < 0 or self.total_votes <= 0:
            raise ValueError(f"review {self.id!r}: need 0 <= X and Y > 0")
        if self.helpful_votes > self.total_votes:
            raise ValueError(
                f"review {self.id!r}: helpful votes {self.helpful_votes} exceed total {self.total_votes}"
            )

    @property
    def label(self) -> bool:
        return derive_label(self.helpful_votes, self.total_votes)


@dataclass(frozen=True)
class ArgumentComponent:
    """A run of clauses sharing one component type.

    ``start`` and ``end`` are 0-based inclusive clause indices; ``position``
    is the 1-based index of the first clause divided by the clause total.
    """

    component_type: ComponentType
    start: int
    end: int
    token_count: int
    letter_count: int
    total_clauses: int

    @property
    def position(self) -> float:
        return (self.start + 1) / self.total_clauses


def derive_label(x: int, y: int) -> bool:
    """True (helpful) iff x / y >= 0.75, compared exactly as 4x >= 3y."""
    if y <= 0:
        raise UndefinedLabelError(f"total votes must be positive, got {y}")
    if not 0 <= x <= y:
        raise ValueError(f"helpful votes must lie in [0, {y}], got {x}")
    return x * HELPFUL_RATIO.denominator >= y * HELPFUL_RATIO.numerator


def majority_vote(labels: Iterable[ComponentType]) -> ComponentType:
    """Most frequent label; ties go to the earliest type in canonical order."""
    counts = Counter(labels)
    if not counts:
        raise ValueError("majority_vote needs at least one label")
    return max(counts, key=lambda t: (counts[t], -int(t)))


def fleiss_kappa(table) -> float:
    """Fleiss' kappa of an items x categories count matrix.

    Computed in exact rational arithmetic, so the result does not depend on
    row or column order.  Returns NaN when chance agreement is 1 (every
    rating falls in one category), where kappa is undefined.
    """
    counts = np.asarray(table)
    if counts.ndim != 2 or counts.shape[0] == 0:
        raise ValueError("fleiss_kappa needs a non-empty 2-D table")
    if (counts < 0).any() or not np.all(counts == np.round(counts)):
        raise ValueError("table entries must be non-negative integers")
    counts = counts.astype(np.int64)
    raters = counts.sum(axis=1)
    if not (raters == raters[0]).all():
        raise ValueError("every row must sum to the same number of raters")
    n = int(raters[0])
    if n < 2:
        raise ValueError("fleiss_kappa needs at least two raters per item")
    items = counts.shape[0]

    sq = int((counts.astype(object) ** 2).sum())
    p_bar = Fraction(sq - items * n, items * n * (n - 1))
    col = counts.sum(axis=0).astype(object)
    p_e = Fraction(int((col**2).sum()), (items * n) ** 2)
    if p_e == 1:
        return math.nan
    return float((p_bar - p_e) / (1 - p_e))


def assemble_components(review: AnnotatedReview, merge_adjacent: bool = True) -> list[ArgumentComponent]:
    n = len(review.clauses)
    tokens = [len(token_strings(c.clause_text)) for c in review.clauses]
    letters = [letter_count(c.clause_text) for c in review.clauses]
    components: list[ArgumentComponent] = []
    start = 0
    for i in range(n):
        last = i == n - 1
        same_next = not last and review.clauses[i + 1].final_label == review.clauses[i].final_label
        if merge_adjacent and same_next:
            continue
        components.append(
            ArgumentComponent(
                review.clauses[i].final_label,
                start,
                i,
                sum(tokens[start : i + 1]),
                sum(letters[start : i + 1]),
                n,
            )
        )
        start = i + 1
    return components


@dataclass(frozen=True)
class TypeStatistics:
    component_type: ComponentType
    count: int
    kappa: float


def rater_count(reviews: Sequence[AnnotatedReview]) -> int | None:
    sizes = {len(c.annotator_labels) for r in reviews for c in r.clauses}
    if len(sizes) > 1:
        raise ValueError(f"inconsistent annotator counts across clauses: {sorted(sizes)}")
    return sizes.pop() if sizes else None


def corpus_statistics(reviews: Sequence[AnnotatedReview], merge_adjacent: bool = True) -> list[TypeStatistics]:
    """Per-type component counts and one-vs-rest Fleiss' kappa."""
    counts = Counter(
        comp.component_type for r in reviews for comp in assemble_components(r, merge_adjacent)
    )
    n = rater_count(reviews)
    labels = [c.annotator_labels for r in reviews for c in r.clauses]
    rows = []
    for t in COMPONENT_TYPES:
        kappa = math.nan
        if labels and n is not None and n >= 2:
            hits = np.array([sum(1 for l in ls if l == t) for ls in labels])
            kappa = fleiss_kappa(np.column_stack([hits, n - hits]))
        rows.append(TypeStatistics(t, counts.get(t, 0), kappa))
    return rows


def format_statistics(rows: Sequence[TypeStatistics]) -> str:
    lines = [f"{'Component Type':<18} {'Number':>7} {'Kappa':>6}"]
    for row in rows:
        kappa = "n/a" if math.isnan(row.kappa) else f"{row.kappa:.2f}"
        lines.append(f"{row.component_type.name:<18} {row.count:>7d} {kappa:>6}")
    return "\n".join(lines) + "\n"


# --- file format -----------------------------------------------------------

_RECORD_KEYS = {"id", "text", "helpful", "total", "clauses"}
_CLAUSE_KEYS = {"text", "labels"}


def _parse_labels(raw, lineno: int, rid: str) -> tuple[ComponentType, ...]:
    if not isinstance(raw, str) or not raw.strip():
        raise CorpusFormatError("clause 'labels' must be a non-empty string", lineno, rid)
    out = []
    for name in raw.split(","):
        name = name.strip()
        if name not in ComponentType.__members__:
            raise CorpusFormatError(f"unknown component type {name!r}", lineno, rid)
        out.append(ComponentType[name])
    return tuple(out)


def parse_record(line: str, lineno: int = 1) -> AnnotatedReview:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"invalid JSON ({exc.msg})", lineno) from None
    if not isinstance(obj, dict):
        raise CorpusFormatError("record must be a JSON object", lineno)
    rid = obj.get("id")
    if not isinstance(rid, str) or not rid:
        raise CorpusFormatError("'id' must be a non-empty string", lineno)
    if set(obj) != _RECORD_KEYS:
        missing = sorted(_RECORD_KEYS - set(obj))
        extra = sorted(set(obj) - _RECORD_KEYS)
        raise CorpusFormatError(f"bad keys (missing {missing}, unexpected {extra})", lineno, rid)
    text = obj["text"]
    if not isinstance(text, str):
        raise CorpusFormatError("'text' must be a string", lineno, rid)
    x, y = obj["helpful"], obj["total"]
    for key, v in (("helpful", x), ("total", y)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise CorpusFormatError(f"{key!r} must be a non-negative integer", lineno, rid)
    if y == 0:
        raise CorpusFormatError("'total' must be positive", lineno, rid)
    if x > y:
        raise CorpusFormatError(f"helpful votes X={x} exceed total votes Y={y}", lineno, rid)
    raw_clauses = obj["clauses"]
    if not isinstance(raw_clauses, list):
        raise CorpusFormatError("'clauses' must be a list", lineno, rid)
    clauses = []
    for k, c in enumerate(raw_clauses):
        if not isinstance(c, dict) or set(c) != _CLAUSE_KEYS:
            raise CorpusFormatError(f"clause {k} must have exactly keys 'text' and 'labels'", lineno, rid)
        if not isinstance(c["text"], str) or not c["text"].strip():
            raise CorpusFormatError(f"clause {k} text must be a non-empty string", lineno, rid)
        clauses.append(ClauseAnnotation.from_labels(c["text"], _parse_labels(c["labels"], lineno, rid)))
    covered = [t for c in clauses for t in token_strings(c.clause_text)]
    if covered != token_strings(text):
        raise CorpusFormatError("clauses do not cover the review text", lineno, rid)
    return AnnotatedReview(rid, text, tuple(clauses), x, y)


def parse_corpus(document: str) -> list[AnnotatedReview]:
    """Parse a JSON Lines corpus; blank lines are skipped."""
    reviews = []
    seen: dict[str, int] = {}
    raters: int | None = None
    for lineno, line in enumerate(document.splitlines(), start=1):
        if not line.strip():
            continue
        review = parse_record(line, lineno)
        if review.id in seen:
            raise CorpusFormatError(f"duplicate id (first on line {seen[review.id]})", lineno, review.id)
        seen[review.id] = lineno
        for c in review.clauses:
            if raters is None:
                raters = len(c.annotator_labels)
            elif len(c.annotator_labels) != raters:
                raise CorpusFormatError(
                    f"clause has {len(c.annotator_labels)} annotator labels, expected {raters}", lineno, review.id
                )
        reviews.append(review)
    return reviews


def review_to_record(review: AnnotatedReview) -> str:
    return json.dumps(
        {
            "id": review.id,
            "text": review.text,
            "helpful": review.helpful_votes,
            "total": review.total_votes,
            "clauses": [
                {"text": c.clause_text, "labels": ",".join(l.name for l in c.annotator_labels)}
                for c in review.clauses
            ],
        },
        ensure_ascii=False,
    )


def dump_corpus(reviews: Iterable[AnnotatedReview]) -> str:
    return "".join(review_to_record(r) + "\n" for r in reviews)
