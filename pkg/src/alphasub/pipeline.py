"""The substitution evaluation: margin, paired bootstrap and TOST per trial."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .alpha import krippendorff_alpha
from .bootstrap import make_schedule, paired_run
from .equivalence import DegenerateMarginWarning, TostOutcome, estimate_margin, tost
from .model import AnnotationMatrix, GroupAssignment
from .substitution import CandidateAnnotations, random_candidate, substitution_sweep

# random-control labels use seed + this offset so they never share a stream with the schedule
CONTROL_SEED_OFFSET = 1_000_003


@dataclass(frozen=True)
class SubstitutionTest:
    """TOST of one candidate plus the per-group bootstrap means."""

    outcome: TostOutcome
    group_means: dict[str, float]
    skipped: int


@dataclass(frozen=True)
class TrialResult:
    seed: int
    margin: float
    human_alpha: float
    candidate: SubstitutionTest
    control: SubstitutionTest | None = None
    warnings: tuple[str, ...] = field(default=())


def substitution_test(
    base: AnnotationMatrix,
    group: tuple[str, ...],
    candidate: CandidateAnnotations,
    schedule,
    margin,
    sig_level: float,
    workers: int = 1,
) -> SubstitutionTest:
    sweep = substitution_sweep(base, group, candidate)
    dists = paired_run(base, sweep, schedule, workers=workers)
    human, subs = dists[0], dists[1:]
    pooled = np.concatenate([d.values for d in subs])
    outcome = tost(pooled, human.values, margin, sig_level)
    means = {g.replaced_annotator: d.mean for g, d in zip(sweep, subs)}
    return SubstitutionTest(outcome, means, sum(d.skipped for d in dists))


def run_trial(
    matrix: AnnotationMatrix,
    groups: GroupAssignment,
    candidate: CandidateAnnotations,
    *,
    B: int,
    N: int | None,
    fraction: float,
    sig_level: float,
    seed: int,
    control: bool = False,
    control_mode: str = "uniform",
    workers: int = 1,
) -> TrialResult:
    """One repetition: shared schedule, margin from groups A vs B, TOST on group A."""
    schedule = make_schedule(matrix.n_items, B, N, seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateMarginWarning)
        margin = estimate_margin(matrix, groups, fraction, schedule)
    notes = tuple(str(w.message) for w in caught if issubclass(w.category, DegenerateMarginWarning))
    base = matrix.restrict_annotators(groups.group_a)
    cand = substitution_test(base, groups.group_a, candidate, schedule, margin, sig_level, workers)
    ctrl = None
    if control:
        rc = random_candidate(base, seed + CONTROL_SEED_OFFSET, mode=control_mode)
        ctrl = substitution_test(base, groups.group_a, rc, schedule, margin, sig_level, workers)
    return TrialResult(seed, margin.delta, cand.outcome.x2, cand, ctrl, notes)


def per_annotator_changes(
    matrix: AnnotationMatrix, group: tuple[str, ...], candidate: CandidateAnnotations
) -> list[tuple[str, float, float]]:
    """(annotator, alpha after substitution, change) on the full item set."""
    base = matrix.restrict_annotators(group)
    a0 = krippendorff_alpha(base).alpha
    rows = []
    for g in substitution_sweep(base, group, candidate):
        a1 = krippendorff_alpha(g.result).alpha
        rows.append((g.replaced_annotator, a1, a1 - a0))
    return rows


def run_trials(
    matrix: AnnotationMatrix,
    groups: GroupAssignment,
    candidate: CandidateAnnotations,
    *,
    trials: int,
    seed: int,
    workers: int = 1,
    **kwargs,
) -> list[TrialResult]:
    """Trials t = 0..trials-1 with schedule seed ``seed + t``; results in trial order."""
    seeds = [seed + t for t in range(trials)]

    def one(s):
        return run_trial(matrix, groups, candidate, seed=s, **kwargs)

    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, seeds))
    return [one(s) for s in seeds]


def mean_sd(values) -> tuple[float, float]:
    arr = np.asarray(list(values), dtype=float)
    if len(arr) == 0:
        return math.nan, math.nan
    return float(arr.mean()), float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
