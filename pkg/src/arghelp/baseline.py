"""Baseline feature families: structural, unigram tf-idf, GALC and INQUIRER."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import AnnotatedReview
from .textproc import default_stopwords, segment_sentences, token_strings
from .vectors import GALC, INQUIRER, STR, UGR, FeatureSpace, FeatureVector

MIN_TERM_FREQUENCY = 3

STR_SPACE = FeatureSpace(
    STR, ("tokens", "sentences", "avg_sentence_length", "exclamation_marks", "question_sentence_share")
)


def str_row(text: str) -> list[float]:
    tokens = len(token_strings(text))
    sentences = segment_sentences(text)
    n = len(sentences)
    questions = sum(1 for s in sentences if s.endswith("?"))
    return [
        float(tokens),
        float(n),
        tokens / n if n else 0.0,
        float(text.count("!")),
        questions / n if n else 0.0,
    ]


def str_matrix(reviews: Sequence[AnnotatedReview]) -> np.ndarray:
    return np.array([str_row(r.text) for r in reviews], dtype=float).reshape(len(reviews), 5)


def str_features(review: AnnotatedReview) -> FeatureVector:
    return FeatureVector.from_dense(STR_SPACE, str_row(review.text))


# --- unigrams --------------------------------------------------------------


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    document_frequencies: tuple[int, ...]
    corpus_size: int

    def __post_init__(self):
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary terms must be unique and sorted")
        if len(self.terms) != len(self.document_frequencies):
            raise ValueError("one document frequency per term")

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def idf(self) -> np.ndarray:
        df = np.asarray(self.document_frequencies, dtype=float)
        return np.log(self.corpus_size / (1.0 + df)) + 1.0

    @property
    def space(self) -> FeatureSpace:
        return FeatureSpace(UGR, self.terms)

    def dumps(self) -> str:
        lines = [f"# corpus_size\t{self.corpus_size}"]
        lines += [f"{t}\t{df}" for t, df in zip(self.terms, self.document_frequencies)]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, document: str) -> "Vocabulary":
        size = None
        terms, dfs = [], []
        for lineno, line in enumerate(document.splitlines(), start=1):
            if not line.strip():
                continue
            key, _, value = line.partition("\t")
            if key == "# corpus_size":
                size = int(value)
                continue
            if not value:
                raise ValueError(f"line {lineno}: expected 'term<TAB>df'")
            terms.append(key)
            dfs.append(int(value))
        if size is None:
            raise ValueError("vocabulary file lacks '# corpus_size' header")
        return cls(tuple(terms), tuple(dfs), size)


def _content_terms(text: str, stopwords: frozenset[str]) -> list[str]:
    return [t for t in token_strings(text) if t not in stopwords]


def build_vocabulary(
    training_reviews: Sequence[AnnotatedReview],
    stopwords: frozenset[str] | None = None,
    min_tf: int = MIN_TERM_FREQUENCY,
) -> Vocabulary:
    """Non-stopword terms whose corpus-wide frequency is at least ``min_tf``."""
    if not training_reviews:
        raise ValueError("cannot build a vocabulary from an empty training set")
    stopwords = default_stopwords() if stopwords is None else stopwords
    tf: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for r in training_reviews:
        terms = _content_terms(r.text, stopwords)
        tf.update(terms)
        df.update(set(terms))
    kept = sorted(t for t, n in tf.items() if n >= min_tf)
    return Vocabulary(tuple(kept), tuple(df[t] for t in kept), len(training_reviews))


def ugr_matrix(reviews: Sequence[AnnotatedReview], vocab: Vocabulary, stopwords: frozenset[str] | None = None) -> np.ndarray:
    stopwords = default_stopwords() if stopwords is None else stopwords
    index = vocab.index
    out = np.zeros((len(reviews), len(vocab.terms)))
    for r, review in enumerate(reviews):
        for term, n in Counter(_content_terms(review.text, stopwords)).items():
            j = index.get(term)
            if j is not None:
                out[r, j] = n
    return out * vocab.idf()


def ugr_features(review: AnnotatedReview, vocab: Vocabulary, stopwords: frozenset[str] | None = None) -> FeatureVector:
    return FeatureVector.from_dense(vocab.space, ugr_matrix([review], vocab, stopwords)[0])


# --- lexicons --------------------------------------------------------------


class LexiconFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Lexicon:
    categories: tuple[str, ...]
    word_to_categories: dict[str, frozenset[int]]

    def __post_init__(self):
        if len(set(self.categories)) != len(self.categories):
            raise ValueError("duplicate category names")
        for w, cats in self.word_to_categories.items():
            if any(not 0 <= c < len(self.categories) for c in cats):
                raise ValueError(f"word {w!r} maps to an unknown category")


def load_lexicon(document: str) -> Lexicon:
    """Parse ``CATEGORY<TAB>word1,word2,...`` lines; ``#`` lines are comments."""
    categories: list[str] = []
    mapping: dict[str, set[int]] = {}
    for lineno, line in enumerate(document.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        name, tab, words = line.partition("\t")
        name = name.strip()
        if not tab or not name:
            raise LexiconFormatError(f"line {lineno}: expected 'CATEGORY<TAB>word,word,...'")
        if name in categories:
            raise LexiconFormatError(f"line {lineno}: duplicate category {name!r}")
        k = len(categories)
        categories.append(name)
        for w in words.split(","):
            w = w.strip().lower()
            if not w:
                continue
            if any(ch.isspace() for ch in w):
                raise LexiconFormatError(f"line {lineno}: word {w!r} contains whitespace")
            mapping.setdefault(w, set()).add(k)
    return Lexicon(tuple(categories), {w: frozenset(c) for w, c in mapping.items()})


def read_lexicon(path: str | Path) -> Lexicon:
    return load_lexicon(Path(path).read_text("utf-8"))


def stub_lexicon(name: str) -> Lexicon:
    """One of the small bundled lexicons: ``"galc"`` or ``"inquirer"``."""
    text = resources.files("arghelp.data").joinpath(f"{name}_stub.tsv").read_text("utf-8")
    return load_lexicon(text)


def _category_counts(text: str, lexicon: Lexicon) -> tuple[np.ndarray, int]:
    counts = np.zeros(len(lexicon.categories))
    unmatched = 0
    for tok in token_strings(text):
        cats = lexicon.word_to_categories.get(tok)
        if cats:
            for c in cats:
                counts[c] += 1
        else:
            unmatched += 1
    return counts, unmatched


def galc_space(lexicon: Lexicon) -> FeatureSpace:
    return FeatureSpace(GALC, lexicon.categories + ("<non-emotional>",))


def inquirer_space(lexicon: Lexicon) -> FeatureSpace:
    return FeatureSpace(INQUIRER, lexicon.categories)


def galc_matrix(reviews: Sequence[AnnotatedReview], lexicon: Lexicon) -> np.ndarray:
    out = np.zeros((len(reviews), len(lexicon.categories) + 1))
    for r, review in enumerate(reviews):
        counts, unmatched = _category_counts(review.text, lexicon)
        out[r, :-1] = counts
        out[r, -1] = unmatched
    return out


def inquirer_matrix(reviews: Sequence[AnnotatedReview], lexicon: Lexicon) -> np.ndarray:
    out = np.zeros((len(reviews), len(lexicon.categories)))
    for r, review in enumerate(reviews):
        out[r] = _category_counts(review.text, lexicon)[0]
    return out


def galc_features(review: AnnotatedReview, lexicon: Lexicon) -> FeatureVector:
    return FeatureVector.from_dense(galc_space(lexicon), galc_matrix([review], lexicon)[0])


def inquirer_features(review: AnnotatedReview, lexicon: Lexicon) -> FeatureVector:
    return FeatureVector.from_dense(inquirer_space(lexicon), inquirer_matrix([review], lexicon)[0])
