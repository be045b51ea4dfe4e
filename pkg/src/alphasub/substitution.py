"""One-at-a-time annotator substitution and the random-label control."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .model import MISSING, AnnotationMatrix, DataError, read_long_format


class SubstitutionError(DataError):
    def __init__(self, message: str, annotator: str | None = None):
        super().__init__(message if annotator is None else f"annotator {annotator}: {message}")
        self.annotator = annotator


@dataclass(frozen=True)
class CandidateAnnotations:
    labels: Mapping[str, str]
    source_tag: str = "candidate"

    def __post_init__(self):
        object.__setattr__(self, "labels", {str(k): str(v) for k, v in dict(self.labels).items()})

    @classmethod
    def from_long_format(cls, source, source_tag: str | None = None) -> "CandidateAnnotations":
        """Load candidate labels from a long-format table.

        The ``annotator_id`` column holds the candidate's tag; a file with
        several tags needs ``source_tag`` to pick one.
        """
        rows = read_long_format(source)
        tags = sorted({r[0] for r in rows})
        if source_tag is None:
            if len(tags) != 1:
                raise DataError(f"candidate file holds several annotator ids {tags}; choose one")
            source_tag = tags[0]
        elif source_tag not in tags:
            raise DataError(f"candidate tag {source_tag!r} not found in file (have {tags})")
        labels: dict[str, str] = {}
        for annotator, item, label in rows:
            if annotator != source_tag:
                continue
            if item in labels:
                raise DataError(f"duplicate candidate label for item {item!r}")
            labels[item] = label
        return cls(labels, source_tag)

    def to_long_format(self, delimiter: str = ",") -> str:
        lines = [delimiter.join(("annotator_id", "item_id", "label"))]
        lines += [delimiter.join((self.source_tag, item, lab)) for item, lab in sorted(self.labels.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def copy_of(cls, matrix: AnnotationMatrix, annotator: str) -> "CandidateAnnotations":
        """A candidate that repeats one annotator's own labels (self-substitution)."""
        j = matrix.annotator_index(annotator)
        labels = {
            item: matrix.alphabet[c] for item, c in zip(matrix.items, matrix.codes[:, j]) if c != MISSING
        }
        return cls(labels, f"copy:{annotator}")


@dataclass(frozen=True)
class SubstitutionGroup:
    base: AnnotationMatrix = field(repr=False)
    replaced_annotator: str
    result: AnnotationMatrix = field(repr=False)


def substitute(
    base: AnnotationMatrix, annotator: str, candidate: CandidateAnnotations
) -> SubstitutionGroup:
    """Overwrite ``annotator``'s present cells with the candidate's labels.

    Cells the annotator left blank stay blank.
    """
    j = base.annotator_index(annotator)
    codes = base.codes.copy()
    for k in np.flatnonzero(base.codes[:, j] != MISSING):
        item = base.items[k]
        try:
            label = candidate.labels[item]
        except KeyError:
            raise SubstitutionError(f"candidate has no label for item {item!r}", annotator) from None
        code = base.alphabet.index(label) if label in base.alphabet else None
        if code is None:
            raise SubstitutionError(
                f"candidate label {label!r} for item {item!r} is outside the alphabet", annotator
            )
        codes[k, j] = code
    return SubstitutionGroup(base, base.annotators[j], base.with_codes(codes))


def substitution_sweep(
    base: AnnotationMatrix,
    group: Iterable[str],
    candidate: "CandidateAnnotations | Mapping[str, CandidateAnnotations]",
) -> list[SubstitutionGroup]:
    """One substitution per group member, ordered by annotator identifier.

    ``candidate`` may also map each annotator to its own replacement, which
    is how self-substitution (every annotator swapped for a copy) is run.
    """
    members = sorted({str(a) for a in group})
    if not members:
        raise DataError("substitution group is empty")
    for a in members:
        if a not in base.annotators:
            raise SubstitutionError("not an annotator of the base matrix", a)
    if isinstance(candidate, CandidateAnnotations):
        return [substitute(base, a, candidate) for a in members]
    missing = [a for a in members if a not in candidate]
    if missing:
        raise SubstitutionError("no candidate given for this annotator", missing[0])
    return [substitute(base, a, candidate[a]) for a in members]


def self_candidates(matrix: AnnotationMatrix, group: Iterable[str]) -> dict[str, CandidateAnnotations]:
    return {a: CandidateAnnotations.copy_of(matrix, a) for a in group}


def random_candidate(
    base: AnnotationMatrix, seed: int, mode: str = "uniform", tag: str = "random"
) -> CandidateAnnotations:
    """I.i.d. random labels for every item of ``base``.

    ``mode="uniform"`` draws uniformly over the alphabet; ``mode="empirical"``
    draws from the matrix's observed label proportions.  Uses numpy's PCG64.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    size = len(base.alphabet)
    if mode == "uniform":
        codes = rng.integers(0, size, size=base.n_items)
    elif mode == "empirical":
        counts = np.bincount(base.codes[base.present], minlength=size).astype(float)
        codes = rng.choice(size, size=base.n_items, p=counts / counts.sum())
    else:
        raise ValueError(f"unknown random candidate mode {mode!r}")
    return CandidateAnnotations({item: base.alphabet[c] for item, c in zip(base.items, codes)}, tag)
