"""Paired bootstrap over items.

Schedules come from numpy's PCG64 bit generator seeded with the integer seed:
``Generator(PCG64(seed)).integers(0, n, size=(B, N))``.  The draw is part of
the file interface, so a schedule serialised as ``{seed, B, N, n}`` can be
regenerated anywhere numpy is available.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .alpha import AlphaUndefined, alpha_batch, item_coincidences, item_histograms
from .model import AnnotationMatrix
from .substitution import SubstitutionGroup

RNG_NAME = "numpy.PCG64"


@dataclass(frozen=True)
class ResamplingSchedule:
    seed: int
    iterations: int
    sample_size: int
    n_items: int
    indices: np.ndarray = field(repr=False)

    def multiplicities(self) -> np.ndarray:
        """(B, n) count of each item in each resample."""
        w = np.zeros((self.iterations, self.n_items))
        rows = np.repeat(np.arange(self.iterations), self.sample_size)
        np.add.at(w, (rows, self.indices.ravel()), 1.0)
        return w

    def to_dict(self) -> dict:
        return {"seed": self.seed, "B": self.iterations, "N": self.sample_size, "n": self.n_items, "rng": RNG_NAME}

    @classmethod
    def from_dict(cls, doc: dict) -> "ResamplingSchedule":
        return make_schedule(doc["n"], doc["B"], doc["N"], doc["seed"])


def default_sample_size(n: int) -> int:
    """40% of the corpus, rounded up."""
    return max(1, math.ceil(0.4 * n))


def make_schedule(n: int, B: int, N: int | None, seed: int) -> ResamplingSchedule:
    if n < 1 or B < 1:
        raise ValueError("need n >= 1 and B >= 1")
    if N is None:
        N = default_sample_size(n)
    if not 1 <= N <= n:
        raise ValueError(f"sample size N={N} must lie in [1, n={n}]")
    rng = np.random.Generator(np.random.PCG64(seed))
    indices = rng.integers(0, n, size=(B, N), dtype=np.int64)
    indices.setflags(write=False)
    return ResamplingSchedule(int(seed), int(B), int(N), int(n), indices)


def identity_schedule(n: int, B: int = 1) -> ResamplingSchedule:
    """Every iteration uses each item exactly once; handy for checks."""
    indices = np.tile(np.arange(n, dtype=np.int64), (B, 1))
    indices.setflags(write=False)
    return ResamplingSchedule(-1, B, n, n, indices)


@dataclass(frozen=True)
class AlphaDistribution:
    group_label: str
    values: np.ndarray
    skipped: int
    iterations: np.ndarray = field(repr=False)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def std(self) -> float:
        return float(np.std(self.values, ddof=1)) if len(self.values) > 1 else 0.0


def bootstrap_alphas(
    matrix: AnnotationMatrix, schedule: ResamplingSchedule, group_label: str = "base"
) -> AlphaDistribution:
    """Alpha on every resample of ``schedule``.

    A resample is the multiset of items ``indices[f]``; an item drawn twice
    contributes its coincidences twice.  Iterations where alpha is undefined
    are counted in ``skipped``; ``iterations`` records which ones were kept.
    """
    if schedule.n_items != matrix.n_items:
        raise ValueError(f"schedule built for n={schedule.n_items}, matrix has n={matrix.n_items}")
    coinc = item_coincidences(item_histograms(matrix))
    alpha, *_ = alpha_batch(coinc, schedule.multiplicities(), matrix.scale, matrix.values)
    keep = np.flatnonzero(~np.isnan(alpha))
    if len(keep) == 0:
        raise AlphaUndefined(f"alpha undefined on all {schedule.iterations} resamples for {group_label}")
    values = alpha[keep]
    values.setflags(write=False)
    return AlphaDistribution(group_label, values, schedule.iterations - len(keep), keep)


def paired_run(
    base: AnnotationMatrix,
    groups: Sequence[SubstitutionGroup],
    schedule: ResamplingSchedule,
    workers: int = 1,
) -> list[AlphaDistribution]:
    """Distributions for [base, *groups], all on the same resamples."""
    for g in groups:
        if g.result.items != base.items:
            raise ValueError(f"substitution group for {g.replaced_annotator} has a different item set")
    jobs = [(base, "human")] + [(g.result, f"sub:{g.replaced_annotator}") for g in groups]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: bootstrap_alphas(job[0], schedule, job[1]), jobs))
    return [bootstrap_alphas(m, schedule, label) for m, label in jobs]
