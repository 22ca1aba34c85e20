import pytest

from arghelp.corpus import AnnotatedReview, ClauseAnnotation, ComponentType

ACCEPTANCE: dict[int, str] = {}


def make_review(labels, texts=None, x=3, y=4, rid="r", annotators=3) -> AnnotatedReview:
    """Review whose clause i has final type labels[i] (unanimous annotators)."""
    labels = [ComponentType[l] if isinstance(l, str) else l for l in labels]
    texts = texts or [f"clause number {i}" for i in range(len(labels))]
    clauses = tuple(ClauseAnnotation.from_labels(t, [l] * annotators) for t, l in zip(texts, labels))
    return AnnotatedReview(rid, ". ".join(texts), clauses, x, y)


@pytest.fixture
def review_factory():
    return make_review


@pytest.fixture
def acceptance():
    """Record one pass/fail line for a numbered acceptance criterion."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
