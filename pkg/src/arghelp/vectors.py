"""Sparse feature vectors, named feature spaces and the sparse text format."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Callable, TextIO

import numpy as np

REGISTRY_VERSION = 1

STR = "STR"
UGR = "UGR"
GALC = "GALC"
INQUIRER = "INQUIRER"
AF_COMPONENT = "AF-component"
AF_TOKEN = "AF-token"
AF_LETTER = "AF-letter"
AF_POSITION = "AF-position"
AF_FAMILIES = (AF_COMPONENT, AF_TOKEN, AF_LETTER, AF_POSITION)
BASELINE_FAMILIES = (STR, UGR, GALC, INQUIRER)
ALL_FAMILIES = BASELINE_FAMILIES + AF_FAMILIES


class LazyNames(Sequence):
    """Read-only sequence whose items are produced on demand by ``fn``."""

    def __init__(self, size: int, fn: Callable[[int], str]):
        self._size = size
        self._fn = fn

    def __len__(self):
        return self._size

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self._size))]
        if i < 0:
            i += self._size
        if not 0 <= i < self._size:
            raise IndexError(i)
        return self._fn(i)


@dataclass(frozen=True)
class FeatureSpace:
    """A family tag plus the registry mapping dimension index to name."""

    family: str
    names: Sequence[str]

    @property
    def size(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class FeatureVector:
    space: FeatureSpace
    values: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for i, v in self.values.items():
            if not 0 <= i < self.space.size:
                raise IndexError(f"dimension {i} outside {self.space.family} ({self.space.size})")
            if v == 0:
                raise ValueError("explicit zero stored in sparse vector")

    @property
    def family(self) -> str:
        return self.space.family

    @property
    def dimension(self) -> int:
        return self.space.size

    def __getitem__(self, i: int) -> float:
        if not 0 <= i < self.space.size:
            raise IndexError(i)
        return self.values.get(i, 0.0)

    def name(self, i: int) -> str:
        return self.space.names[i]

    def by_name(self) -> dict[str, float]:
        return {self.space.names[i]: v for i, v in self.values.items()}

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.space.size)
        if self.values:
            idx = np.fromiter(self.values.keys(), dtype=np.int64)
            out[idx] = np.fromiter(self.values.values(), dtype=float)
        return out

    @classmethod
    def from_dense(cls, space: FeatureSpace, row) -> "FeatureVector":
        row = np.asarray(row, dtype=float)
        if row.shape != (space.size,):
            raise ValueError(f"expected {space.size} values for {space.family}, got {row.shape}")
        nz = np.flatnonzero(row)
        return cls(space, dict(zip(nz.tolist(), row[nz].tolist())))


# --- sparse text format ----------------------------------------------------
#
#   # arghelp-features v1
#   # families AF-component=16002 AF-token=32039
#   <review-id> <dim>:<value> <dim>:<value> ...
#
# Dimensions index the concatenation of the listed families, ascending.


def write_sparse(out: TextIO, families: Sequence[tuple[str, int]], ids: Sequence[str], matrix) -> None:
    matrix = np.asarray(matrix, dtype=float)
    total = sum(size for _, size in families)
    if matrix.shape != (len(ids), total):
        raise ValueError(f"matrix shape {matrix.shape} does not match {len(ids)} x {total}")
    out.write(f"# arghelp-features v{REGISTRY_VERSION}\n")
    out.write("# families " + " ".join(f"{f}={n}" for f, n in families) + "\n")
    for rid, row in zip(ids, matrix):
        nz = np.flatnonzero(row)
        pairs = " ".join(f"{i}:{float(row[i])!r}" for i in nz.tolist())
        out.write(f"{rid} {pairs}".rstrip() + "\n")


def read_sparse(lines) -> tuple[list[tuple[str, int]], list[str], np.ndarray]:
    it = iter(lines)
    head = next(it, "").strip()
    if head != f"# arghelp-features v{REGISTRY_VERSION}":
        raise ValueError(f"unsupported feature file header {head!r}")
    fam_line = next(it, "").strip()
    if not fam_line.startswith("# families"):
        raise ValueError("missing '# families' header line")
    families = []
    for item in fam_line[len("# families"):].split():
        name, size = item.rsplit("=", 1)
        families.append((name, int(size)))
    total = sum(n for _, n in families)
    ids, rows = [], []
    for lineno, line in enumerate(it, start=3):
        line = line.strip()
        if not line:
            continue
        rid, *pairs = line.split()
        row = np.zeros(total)
        last = -1
        for p in pairs:
            i, v = p.split(":", 1)
            i = int(i)
            if not last < i < total:
                raise ValueError(f"line {lineno}: dimension {i} out of order or range")
            row[i] = float(v)
            last = i
        ids.append(rid)
        rows.append(row)
    return families, ids, np.array(rows).reshape(len(rows), total)
