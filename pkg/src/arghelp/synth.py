"""Synthetic annotated-review corpora with a controllable helpfulness signal.

A latent score z ~ U(-1, 1) per review drives one argument statistic (the
*planted* family).  With probability ``signal`` the label is ``z > 0``;
otherwise it is a fair coin.  The other families are kept uninformative:

* ``token``     premise-group clauses get longer and claim-group clauses
                shorter as z grows, while each clause's letter total is drawn
                independently (long clauses get short words).
* ``letter``    the same on letter totals with token counts held independent.
* ``component`` premise-group types become more frequent than claim-group
                types as z grows.
* ``position``  major claims move towards the start of the review as z grows.
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass, field

import numpy as np

from .corpus import COMPONENT_TYPES, AnnotatedReview, ClauseAnnotation, ComponentType
from .textproc import default_stopwords

PLANTED_FAMILIES = ("token", "letter", "component", "position")

DEFAULT_PROBS = {
    ComponentType.MajorClaim: 0.10,
    ComponentType.Claim: 0.25,
    ComponentType.Premise: 0.25,
    ComponentType.PSIC: 0.10,
    ComponentType.Background: 0.10,
    ComponentType.Recommendation: 0.08,
    ComponentType.NonArgumentative: 0.12,
}
PREMISE_GROUP = (ComponentType.Premise, ComponentType.PSIC)
CLAIM_GROUP = (ComponentType.MajorClaim, ComponentType.Claim)

_MAX_WORD = 16
_LEXICON_WORDS = (
    "amazing awesome lovely wonderful clean friendly helpful spacious comfortable excellent "
    "dirty rude noisy terrible awful small broken poor absurd happy disappointed relaxing "
    "enjoyed annoying surprised staff room location breakfast night morning balcony lobby "
    "restaurant manager walk street coffee"
).split()


class InfeasibleSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int = 0
    reviews: int = 400
    clause_range: tuple[int, int] = (6, 14)
    label_probs: dict = field(default_factory=lambda: dict(DEFAULT_PROBS))
    signal: float = 0.8
    annotator_noise: float = 0.1
    annotators: int = 3
    planted: str = "token"
    strength: float = 0.5

    def validate(self) -> None:
        lo, hi = self.clause_range
        if not 2 <= lo <= hi:
            raise InfeasibleSpecError("clause_range needs 2 <= min <= max (a claim and a premise per review)")
        if self.reviews < 1:
            raise InfeasibleSpecError("reviews must be positive")
        probs = [self.label_probs.get(t, 0.0) for t in COMPONENT_TYPES]
        if any(p < 0 for p in probs) or not math.isclose(sum(probs), 1.0, abs_tol=1e-9):
            raise InfeasibleSpecError("label probabilities must be non-negative and sum to 1")
        if set(self.label_probs) - set(COMPONENT_TYPES):
            raise InfeasibleSpecError("label_probs keys must be component types")
        if not 0.0 <= self.signal <= 1.0:
            raise InfeasibleSpecError("signal strength must lie in [0, 1]")
        if not 0.0 <= self.annotator_noise <= 1.0:
            raise InfeasibleSpecError("annotator noise must lie in [0, 1]")
        if self.annotators < 1:
            raise InfeasibleSpecError("need at least one annotator")
        if self.planted not in PLANTED_FAMILIES:
            raise InfeasibleSpecError(f"planted family must be one of {PLANTED_FAMILIES}")


def _word_pool(per_length: int = 25) -> dict[int, list[str]]:
    """Fixed pseudo-word pool bucketed by length, plus the lexicon words."""
    rng = np.random.default_rng(20170907)
    stop = default_stopwords()
    cons, vows = "bcdfghklmnprstvz", "aeiou"
    pool: dict[int, set[str]] = {n: set() for n in range(1, _MAX_WORD + 1)}
    pool[1] = set(string.ascii_lowercase[:per_length]) - stop
    for n in range(2, _MAX_WORD + 1):
        while len(pool[n]) < per_length:
            w = "".join(rng.choice(list(cons if k % 2 == 0 else vows)) for k in range(n))
            if w not in stop:
                pool[n].add(w)
    for w in _LEXICON_WORDS:
        pool[len(w)].add(w)
    return {n: sorted(ws) for n, ws in pool.items()}


def _split_letters(total: int, tokens: int) -> list[int]:
    base, extra = divmod(max(total, tokens), tokens)
    lengths = [min(_MAX_WORD, base + (1 if k < extra else 0)) for k in range(tokens)]
    return lengths


class _Generator:
    def __init__(self, spec: SyntheticSpec):
        spec.validate()
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)
        self.pool = _word_pool()
        self.types = list(COMPONENT_TYPES)
        self.probs = np.array([spec.label_probs.get(t, 0.0) for t in COMPONENT_TYPES])

    def labels(self, n: int, z: float) -> list[ComponentType]:
        s = self.spec
        probs = self.probs.copy()
        if s.planted == "component":
            tilt = math.exp(2 * s.strength * z)
            for t in PREMISE_GROUP:
                probs[int(t)] *= tilt
            for t in CLAIM_GROUP:
                probs[int(t)] /= tilt
            probs /= probs.sum()
        out = [self.types[k] for k in self.rng.choice(len(probs), size=n, p=probs)]
        # every review carries at least one claim and one premise
        if ComponentType.Claim not in out:
            out[int(self.rng.integers(n))] = ComponentType.Claim
        if ComponentType.Premise not in out:
            keep = out.index(ComponentType.Claim)
            free = [k for k in range(n) if k != keep]
            out[free[int(self.rng.integers(len(free)))]] = ComponentType.Premise
        if s.planted == "position":
            majors = [k for k, t in enumerate(out) if t == ComponentType.MajorClaim]
            if not majors:
                majors = [int(self.rng.integers(n))]
                out[majors[0]] = ComponentType.MajorClaim
            # move one major claim towards the front (z > 0) or the back
            target = round((1 - (z + 1) / 2) * (n - 1))
            k = majors[0]
            out[k], out[target] = out[target], out[k]
        return out

    def amounts(self, label: ComponentType, z: float) -> tuple[int, int]:
        """(tokens, letters) for one clause."""
        s = self.spec
        tokens = int(self.rng.integers(4, 11))
        letters = int(self.rng.integers(36, 61))
        tilt = 0.0
        if label in PREMISE_GROUP:
            tilt = s.strength * z
        elif label in CLAIM_GROUP:
            tilt = -s.strength * z
        if s.planted == "token":
            tokens = max(1, round(7 * math.exp(tilt) + self.rng.uniform(-1.5, 1.5)))
        elif s.planted == "letter":
            letters = max(tokens, round(48 * math.exp(tilt) + self.rng.uniform(-6, 6)))
        return tokens, letters

    def clause_text(self, tokens: int, letters: int) -> str:
        words = []
        for n in _split_letters(letters, tokens):
            bucket = self.pool[n]
            words.append(bucket[int(self.rng.integers(len(bucket)))])
        return " ".join(words)

    def annotate(self, gold: ComponentType) -> list[ComponentType]:
        out = []
        for _ in range(self.spec.annotators):
            if self.rng.random() < self.spec.annotator_noise:
                others = [t for t in self.types if t != gold]
                out.append(others[int(self.rng.integers(len(others)))])
            else:
                out.append(gold)
        return out

    def votes(self, helpful: bool) -> tuple[int, int]:
        y = int(self.rng.integers(4, 61))
        cut = (3 * y + 3) // 4  # smallest X with 4X >= 3Y
        x = int(self.rng.integers(cut, y + 1)) if helpful else int(self.rng.integers(0, cut))
        return x, y

    def review(self, idx: int) -> AnnotatedReview:
        s = self.spec
        z = float(self.rng.uniform(-1.0, 1.0))
        coin = bool(self.rng.random() < 0.5)
        helpful = (z > 0) if self.rng.random() < s.signal else coin
        n = int(self.rng.integers(s.clause_range[0], s.clause_range[1] + 1))
        gold = self.labels(n, z)
        texts = [self.clause_text(*self.amounts(t, z)) for t in gold]
        clauses = tuple(ClauseAnnotation.from_labels(t, self.annotate(g)) for t, g in zip(texts, gold))
        sentences, k = [], 0
        while k < n:
            size = int(self.rng.integers(1, 4))
            body = ", ".join(texts[k : k + size])
            end = self.rng.choice([".", ".", ".", "!", "?"])
            sentences.append(body[:1].upper() + body[1:] + end)
            k += size
        x, y = self.votes(helpful)
        return AnnotatedReview(f"syn{s.seed}-{idx:05d}", " ".join(sentences), clauses, x, y)


def generate(spec: SyntheticSpec) -> list[AnnotatedReview]:
    gen = _Generator(spec)
    return [gen.review(i) for i in range(spec.reviews)]
