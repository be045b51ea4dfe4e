"""Annotation data model, long-format ingestion and dataset filtering."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

MISSING = -1
REQUIRED_COLUMNS = ("annotator_id", "item_id", "label")


class DataError(ValueError):
    """Raised for malformed or unusable annotation data."""


class InfeasibleError(DataError):
    """No annotator/item subset satisfies the selection criteria."""


class Scale(str, enum.Enum):
    NOMINAL = "nominal"
    ORDINAL = "ordinal"
    INTERVAL = "interval"

    @classmethod
    def parse(cls, value: "str | Scale") -> "Scale":
        try:
            return cls(value)
        except ValueError:
            raise DataError(f"unknown scale {value!r}; expected nominal, ordinal or interval") from None


def _as_number(label: str) -> float | None:
    try:
        value = float(label)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def sort_labels(labels: Iterable[str]) -> tuple[str, ...]:
    """Sort distinct labels numerically when every label is a number, else lexically."""
    distinct = set(labels)
    if distinct and all(_as_number(x) is not None for x in distinct):
        return tuple(sorted(distinct, key=lambda x: (_as_number(x), x)))
    return tuple(sorted(distinct))


@dataclass(frozen=True, eq=False)
class AnnotationMatrix:
    """Items x annotators grid of label codes.

    ``codes[k, a]`` is an index into ``alphabet`` or ``MISSING``.  The array is
    frozen after construction so matrices can be shared freely.
    """

    items: tuple[str, ...]
    annotators: tuple[str, ...]
    codes: np.ndarray
    scale: Scale
    alphabet: tuple[str, ...]
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int64, copy=True)
        object.__setattr__(self, "items", tuple(str(x) for x in self.items))
        object.__setattr__(self, "annotators", tuple(str(x) for x in self.annotators))
        object.__setattr__(self, "alphabet", tuple(str(x) for x in self.alphabet))
        object.__setattr__(self, "scale", Scale.parse(self.scale))
        n, i = len(self.items), len(self.annotators)
        if codes.shape != (n, i):
            raise DataError(f"codes shape {codes.shape} does not match {n} items x {i} annotators")
        if n < 1:
            raise DataError("matrix needs at least one item")
        if i < 2:
            raise DataError("matrix needs at least two annotators")
        if len(set(self.items)) != n or len(set(self.annotators)) != i:
            raise DataError("item and annotator identifiers must be unique")
        if len(set(self.alphabet)) != len(self.alphabet) or not self.alphabet:
            raise DataError("alphabet must be a non-empty sequence of distinct labels")
        if codes.size and (codes.min() < MISSING or codes.max() >= len(self.alphabet)):
            raise DataError("label code outside the alphabet")
        if not np.any((codes != MISSING).sum(axis=1) >= 2):
            raise DataError("no item has two or more labels; agreement is undefined")
        if self.scale is Scale.INTERVAL:
            values = [_as_number(x) for x in self.alphabet]
            if any(v is None for v in values):
                bad = [x for x, v in zip(self.alphabet, values) if v is None]
                raise DataError(f"interval scale needs numeric labels, got {bad!r}")
        else:
            values = [float(k) for k in range(len(self.alphabet))]
        codes.setflags(write=False)
        vals = np.asarray(values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "values", vals)

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_annotators(self) -> int:
        return len(self.annotators)

    @property
    def present(self) -> np.ndarray:
        return self.codes != MISSING

    def annotator_index(self, annotator: str) -> int:
        try:
            return self.annotators.index(str(annotator))
        except ValueError:
            raise KeyError(f"unknown annotator {annotator!r}") from None

    def label(self, item: str, annotator: str) -> str | None:
        code = self.codes[self.items.index(str(item)), self.annotator_index(annotator)]
        return None if code == MISSING else self.alphabet[code]

    def code_of(self, label: str) -> int:
        try:
            return self.alphabet.index(str(label))
        except ValueError:
            raise DataError(f"label {label!r} is not in the alphabet {list(self.alphabet)}") from None

    def with_codes(self, codes: np.ndarray) -> "AnnotationMatrix":
        return AnnotationMatrix(self.items, self.annotators, codes, self.scale, self.alphabet)

    def restrict_annotators(self, annotators: Iterable[str]) -> "AnnotationMatrix":
        """Keep the given annotators (in the given order), same items and alphabet."""
        cols = [self.annotator_index(a) for a in annotators]
        return AnnotationMatrix(
            self.items, tuple(self.annotators[c] for c in cols), self.codes[:, cols], self.scale, self.alphabet
        )

    def restrict_items(self, indices: Sequence[int]) -> "AnnotationMatrix":
        """Row subset; repeated indices become distinct items (suffix ``#r``)."""
        seen: dict[int, int] = {}
        names = []
        for k in indices:
            r = seen.get(k, 0)
            seen[k] = r + 1
            names.append(self.items[k] if r == 0 else f"{self.items[k]}#{r}")
        return AnnotationMatrix(tuple(names), self.annotators, self.codes[list(indices)], self.scale, self.alphabet)

    def cells(self) -> list[tuple[int, int, int]]:
        ks, js = np.nonzero(self.present)
        return [(int(k), int(j), int(self.codes[k, j])) for k, j in zip(ks, js)]

    def to_dict(self) -> dict:
        return {
            "scale": self.scale.value,
            "alphabet": list(self.alphabet),
            "items": list(self.items),
            "annotators": list(self.annotators),
            "cells": [list(c) for c in sorted(self.cells())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AnnotationMatrix":
        items, annotators = list(doc["items"]), list(doc["annotators"])
        codes = np.full((len(items), len(annotators)), MISSING, dtype=np.int64)
        for k, j, c in doc["cells"]:
            codes[k, j] = c
        return cls(tuple(items), tuple(annotators), codes, Scale.parse(doc["scale"]), tuple(doc["alphabet"]))

    @classmethod
    def from_json(cls, text: str) -> "AnnotationMatrix":
        return cls.from_dict(json.loads(text))

    def to_long_format(self, delimiter: str = ",") -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
        writer.writerow(REQUIRED_COLUMNS)
        for k, j, c in sorted(self.cells()):
            writer.writerow((self.annotators[j], self.items[k], self.alphabet[c]))
        return buf.getvalue()

    def label_counts(self) -> dict[str, int]:
        counts = np.bincount(self.codes[self.present], minlength=len(self.alphabet))
        return {lab: int(c) for lab, c in zip(self.alphabet, counts)}


@dataclass(frozen=True)
class GroupAssignment:
    group_a: tuple[str, ...]
    group_b: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "group_a", tuple(str(a) for a in self.group_a))
        object.__setattr__(self, "group_b", tuple(str(b) for b in self.group_b))
        if not self.group_a or not self.group_b:
            raise DataError("both groups must be non-empty")
        if set(self.group_a) & set(self.group_b):
            raise DataError("groups must be disjoint")
        if len(set(self.group_a)) != len(self.group_a) or len(set(self.group_b)) != len(self.group_b):
            raise DataError("duplicate annotator inside a group")
        if len(self.group_a) != len(self.group_b):
            raise DataError(f"groups must have equal size, got {len(self.group_a)} and {len(self.group_b)}")


def read_long_format(source: "bytes | str | IO") -> list[tuple[str, str, str]]:
    """Parse a delimited long-format table into (annotator_id, item_id, label) rows."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8-sig")
    text = source.lstrip("﻿")
    if not text.strip():
        raise DataError("empty input")
    lines = text.splitlines()
    header_line = lines[0]
    delimiter = "\t" if "\t" in header_line else ","
    reader = csv.reader(lines, delimiter=delimiter)
    header = [h.strip() for h in next(reader)]
    if sorted(header) != sorted(REQUIRED_COLUMNS):
        raise DataError(f"header must name exactly {list(REQUIRED_COLUMNS)}, got {header}")
    pos = [header.index(col) for col in REQUIRED_COLUMNS]
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} columns, got {len(row)}")
        rows.append(tuple(row[p].strip() for p in pos))
    if not rows:
        raise DataError("no annotation rows")
    return rows


def matrix_from_rows(
    rows: Iterable[tuple[str, str, str]],
    scale: "Scale | str",
    alphabet: Sequence[str] | None = None,
) -> AnnotationMatrix:
    scale = Scale.parse(scale)
    cells: dict[tuple[str, str], str] = {}
    for annotator, item, label in rows:
        key = (item, annotator)
        if key in cells:
            raise DataError(f"duplicate annotation for item {item!r} by annotator {annotator!r}")
        if scale is Scale.INTERVAL and _as_number(label) is None:
            raise DataError(f"label {label!r} is not numeric under the interval scale")
        cells[key] = label
    if alphabet is None:
        alphabet = sort_labels(cells.values())
    else:
        alphabet = tuple(str(x) for x in alphabet)
        unknown = set(cells.values()) - set(alphabet)
        if unknown:
            raise DataError(f"labels {sorted(unknown)} are not in the declared alphabet")
    items = sort_labels(k[0] for k in cells)
    annotators = sort_labels(k[1] for k in cells)
    item_pos = {x: k for k, x in enumerate(items)}
    ann_pos = {x: j for j, x in enumerate(annotators)}
    code = {x: c for c, x in enumerate(alphabet)}
    codes = np.full((len(items), len(annotators)), MISSING, dtype=np.int64)
    for (item, annotator), label in cells.items():
        codes[item_pos[item], ann_pos[annotator]] = code[label]
    return AnnotationMatrix(items, annotators, codes, scale, alphabet)


def load_long_format(
    source: "bytes | str | IO", scale: "Scale | str", alphabet: Sequence[str] | None = None
) -> AnnotationMatrix:
    """Build a matrix from a long-format annotation table.

    ``source`` is the table content (bytes, text, or a readable file object),
    comma or tab delimited, with columns ``annotator_id, item_id, label``.
    The alphabet defaults to the sorted set of observed labels; pass
    ``alphabet`` to fix the order (needed for non-numeric ordinal labels).
    Items and annotators are sorted, so row order never matters.
    """
    return matrix_from_rows(read_long_format(source), scale, alphabet)


def load_movielens(path, scale: "Scale | str" = Scale.INTERVAL) -> AnnotationMatrix:
    """Read a MovieLens ``u.data`` file (user, item, rating, timestamp; tab separated)."""
    rows = []
    with open(path, encoding="latin-1") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 3:
                raise DataError(f"{path}:{lineno}: expected user, item, rating")
            rows.append((parts[0], parts[1], parts[2]))
    return matrix_from_rows(rows, scale)


# -- filtering ---------------------------------------------------------------


def _coverage(present: np.ndarray, cols: Sequence[int]) -> np.ndarray:
    return present[:, list(cols)].sum(axis=1)


def check_filter(
    matrix: AnnotationMatrix, groups: GroupAssignment, min_items: int, min_coders_per_item: int
) -> list[str]:
    """Return a list of violated selection criteria (empty when all hold)."""
    problems = []
    members = set(groups.group_a) | set(groups.group_b)
    if set(matrix.annotators) != members:
        problems.append("matrix annotators differ from the union of the groups")
    if matrix.n_items < min_items:
        problems.append(f"only {matrix.n_items} items, need {min_items}")
    for name, group in (("A", groups.group_a), ("B", groups.group_b)):
        for k, item in enumerate(matrix.items):
            n_lab = sum(matrix.label(item, a) is not None for a in group if a in matrix.annotators)
            if n_lab < min_coders_per_item:
                problems.append(f"item {item} has {n_lab} coders in group {name}")
    for a in members & set(matrix.annotators):
        if all(matrix.label(item, a) is None for item in matrix.items):
            problems.append(f"annotator {a} labels no selected item")
    return problems


def filter_dataset(
    raw: AnnotationMatrix,
    group_size: int,
    min_items: int,
    min_coders_per_item: int = 2,
    max_items: int | None = None,
) -> tuple[AnnotationMatrix, GroupAssignment]:
    """Select two disjoint, equal-size annotator groups and the items both cover.

    Greedy and deterministic: annotators are ranked by how many items they
    labeled (ties by identifier order), the top ``2 * group_size`` are taken
    and dealt into groups A/B by rank parity.  Items kept are those labeled by
    at least ``min_coders_per_item`` members of each group.  When the
    selection falls short, the selected annotator covering the fewest kept
    items is swapped for the next-ranked unused annotator, until the criteria
    hold or the ranking is exhausted.  ``max_items`` keeps only the
    best-covered items.
    """
    if min_items < 1:
        raise ValueError("min_items must be >= 1")
    if min_coders_per_item < 2:
        raise ValueError("min_coders_per_item must be >= 2")
    if group_size < 1:
        raise ValueError("group_size must be >= 1")
    if group_size < min_coders_per_item:
        raise InfeasibleError(
            f"group_size {group_size} cannot give {min_coders_per_item} coders per item within a group"
        )
    i = raw.n_annotators
    if 2 * group_size > i:
        raise InfeasibleError(f"need {2 * group_size} annotators, dataset has {i}")

    present = raw.present
    per_annotator = present.sum(axis=0)
    ranked = sorted(range(i), key=lambda j: (-per_annotator[j], j))
    selected = ranked[: 2 * group_size]
    queue = ranked[2 * group_size :]

    while True:
        selected.sort(key=ranked.index)
        cols_a, cols_b = selected[0::2], selected[1::2]
        ok_items = (_coverage(present, cols_a) >= min_coders_per_item) & (
            _coverage(present, cols_b) >= min_coders_per_item
        )
        keep = np.flatnonzero(ok_items)
        if max_items is not None and len(keep) > max_items:
            depth = present[np.ix_(keep, selected)].sum(axis=1)
            order = sorted(range(len(keep)), key=lambda t: (-depth[t], keep[t]))
            keep = np.sort(keep[order[:max_items]])
        per_selected = present[np.ix_(keep, selected)].sum(axis=0) if len(keep) else np.zeros(len(selected))
        if len(keep) >= min_items and np.all(per_selected >= 1):
            break
        if not queue:
            raise InfeasibleError(
                f"no selection of 2x{group_size} annotators covers {min_items} items "
                f"with {min_coders_per_item} coders per group"
            )
        weakest = min(range(len(selected)), key=lambda t: (per_selected[t], -ranked.index(selected[t])))
        selected[weakest] = queue.pop(0)

    groups = GroupAssignment(
        tuple(raw.annotators[j] for j in cols_a), tuple(raw.annotators[j] for j in cols_b)
    )
    sub = AnnotationMatrix(
        tuple(raw.items[k] for k in keep),
        tuple(raw.annotators[j] for j in cols_a + cols_b),
        raw.codes[np.ix_(keep, cols_a + cols_b)],
        raw.scale,
        raw.alphabet,
    )
    return sub, groups
