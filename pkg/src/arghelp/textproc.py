"""Tokenization, sentence/clause segmentation and letter counting.

Every feature extractor goes through these helpers so that token and
letter counts agree across the whole pipeline.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

_SENTENCE_END = re.compile(r"(?<=[.!?])\s+")
_CLAUSE_DELIMS = re.compile(r"[,;:\u2014\u2013]|\s-\s|--")
_TOKEN_SPLIT = re.compile(r"[\W_]+")


def parse_stopwords(document: str) -> frozenset[str]:
    """Parse a stopword file: one lowercase word per line, ``#`` comments."""
    words = set()
    for line in document.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    text = resources.files("arghelp.data").joinpath("stopwords.txt").read_text("utf-8")
    return parse_stopwords(text)


def load_stopwords(path: str | Path | None) -> frozenset[str]:
    if path is None:
        return default_stopwords()
    return parse_stopwords(Path(path).read_text("utf-8"))


@dataclass(frozen=True)
class Token:
    surface: str
    is_stopword: bool = False


@dataclass(frozen=True)
class SegmentedText:
    sentences: list[str]
    clauses: list[str]
    tokens: list[Token] = field(default_factory=list)


def segment_sentences(text: str) -> list[str]:
    """Split on ``.``, ``!`` or ``?`` followed by whitespace or end of text."""
    pieces = _SENTENCE_END.split(text.strip())
    return [p.strip() for p in pieces if p.strip()]


def segment_clauses(sentence: str) -> list[str]:
    """Split a sentence at commas, semicolons, colons and dashes."""
    pieces = _CLAUSE_DELIMS.split(sentence)
    return [p.strip() for p in pieces if p.strip()]


def token_strings(text: str) -> list[str]:
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def tokenize(text: str, stopwords: frozenset[str] | None = None) -> list[Token]:
    """Lowercase and split on every non-alphanumeric character.

    >>> [t.surface for t in tokenize("don't")]
    ['don', 't']
    """
    if stopwords is None:
        stopwords = default_stopwords()
    return [Token(s, s in stopwords) for s in token_strings(text)]


def letter_count(text: str) -> int:
    """Number of alphabetic characters; digits, punctuation and spaces excluded."""
    return sum(1 for ch in text if ch.isalpha())


def segment(text: str, stopwords: frozenset[str] | None = None) -> SegmentedText:
    sentences = segment_sentences(text)
    clauses = [c for s in sentences for c in segment_clauses(s)]
    return SegmentedText(sentences, clauses, tokenize(text, stopwords))
