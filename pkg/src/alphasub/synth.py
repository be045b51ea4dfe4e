"""Synthetic annotators built from linear cue-integration judgment models.

An annotator scores an item as ``weights . cues + noise`` and maps the score
to an ordered label through fixed thresholds.  Populations whose weights are
perturbations of one common vector give controllable agreement levels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .model import MISSING, AnnotationMatrix, Scale
from .substitution import CandidateAnnotations

# stream ids mixed into an annotator's seed
_NOISE, _RETEST, _MISSING = 0, 1, 2


@dataclass(frozen=True)
class SyntheticTask:
    n_items: int
    cue_dim: int
    cues: np.ndarray = field(repr=False)
    alphabet: tuple[str, ...]
    thresholds: np.ndarray
    seed: int = 0

    @property
    def items(self) -> tuple[str, ...]:
        width = len(str(self.n_items - 1))
        return tuple(f"item{k:0{width}d}" for k in range(self.n_items))


@dataclass(frozen=True)
class CueModelAnnotator:
    weights: np.ndarray
    noise_sd: float = 0.0
    inconsistency: float = 0.0
    seed: int = 0
    name: str = "synth"

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        if not 0 <= self.inconsistency <= 1:
            raise ValueError("inconsistency must lie in [0, 1]")


def generate_task(n_items: int, cue_dim: int, alphabet_size: int, seed: int) -> SyntheticTask:
    """Standard-normal cues and equal-probability thresholds.

    Under unit weights the noiseless score is N(0, cue_dim), so the cut
    points sqrt(cue_dim) * Phi^-1(k / |alphabet|) give roughly uniform labels.
    """
    if n_items < 1 or cue_dim < 1:
        raise ValueError("n_items and cue_dim must be >= 1")
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be >= 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    cues = rng.standard_normal((n_items, cue_dim))
    nd = NormalDist()
    thresholds = np.array([np.sqrt(cue_dim) * nd.inv_cdf(k / alphabet_size) for k in range(1, alphabet_size)])
    alphabet = tuple(str(k) for k in range(1, alphabet_size + 1))
    cues.setflags(write=False)
    return SyntheticTask(n_items, cue_dim, cues, alphabet, thresholds, seed)


def _rng(seed: int, stream: int, replicate: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, replicate])))


def scores(task: SyntheticTask, annotator: CueModelAnnotator, replicate: int = 0) -> np.ndarray:
    """Noisy linear scores.

    Noise is fixed per annotator seed.  On ``replicate > 0`` each item's noise
    is redrawn with probability ``inconsistency``, which models test-retest
    inconsistency of one judge.
    """
    if annotator.weights.shape != (task.cue_dim,):
        raise ValueError(f"annotator has {annotator.weights.shape} weights, task has {task.cue_dim} cues")
    noise = _rng(annotator.seed, _NOISE).standard_normal(task.n_items)
    if replicate and annotator.inconsistency > 0:
        rr = _rng(annotator.seed, _RETEST, replicate)
        redraw = rr.random(task.n_items) < annotator.inconsistency
        noise = np.where(redraw, rr.standard_normal(task.n_items), noise)
    return task.cues @ annotator.weights + annotator.noise_sd * noise


def label_codes(task: SyntheticTask, annotator: CueModelAnnotator, missing_rate: float = 0.0, replicate: int = 0):
    if not 0 <= missing_rate < 1:
        raise ValueError("missing_rate must lie in [0, 1)")
    codes = np.searchsorted(task.thresholds, scores(task, annotator, replicate), side="right")
    if missing_rate > 0:
        blank = _rng(annotator.seed, _MISSING, replicate).random(task.n_items) < missing_rate
        codes = np.where(blank, MISSING, codes)
    return codes


def annotate(
    task: SyntheticTask, annotator: CueModelAnnotator, missing_rate: float = 0.0, replicate: int = 0
) -> CandidateAnnotations:
    codes = label_codes(task, annotator, missing_rate, replicate)
    labels = {item: task.alphabet[c] for item, c in zip(task.items, codes) if c != MISSING}
    return CandidateAnnotations(labels, annotator.name)


def make_population(
    task: SyntheticTask,
    size: int,
    base_weights: Sequence[float] | None = None,
    weight_sd: float = 0.5,
    noise_sd: float = 1.0,
    seed: int = 0,
    prefix: str = "h",
) -> list[CueModelAnnotator]:
    """``size`` annotators with weights drawn i.i.d. around ``base_weights``."""
    base = np.ones(task.cue_dim) if base_weights is None else np.asarray(base_weights, dtype=float)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 7919])))
    width = len(str(size - 1))
    out = []
    for a in range(size):
        w = base + weight_sd * rng.standard_normal(task.cue_dim)
        out.append(CueModelAnnotator(w, noise_sd, 0.0, int(rng.integers(2**31)), f"{prefix}{a:0{width}d}"))
    return out


def population_matrix(
    task: SyntheticTask,
    annotators: Sequence[CueModelAnnotator],
    missing_rate: float = 0.0,
    scale: Scale | str = Scale.INTERVAL,
) -> AnnotationMatrix:
    """Stack annotators into a matrix; items left with < 2 labels are kept."""
    codes = np.column_stack([label_codes(task, a, missing_rate) for a in annotators])
    return AnnotationMatrix(task.items, tuple(a.name for a in annotators), codes, Scale.parse(scale), task.alphabet)


def orthogonal_weights(cue_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Two orthogonal weight vectors with the same norm as the unit vector."""
    if cue_dim < 2:
        raise ValueError("need at least two cues")
    half = cue_dim // 2
    scale = np.sqrt(cue_dim / half)
    w1 = np.zeros(cue_dim)
    w2 = np.zeros(cue_dim)
    w1[:half] = scale
    w2[half : 2 * half] = scale
    return w1, w2


def orthogonal_to(base: Sequence[float], seed: int) -> np.ndarray:
    """A random weight vector orthogonal to ``base`` with the same norm.

    A judge with these weights ignores the population's shared cue policy.
    """
    base = np.asarray(base, dtype=float)
    if len(base) < 2:
        raise ValueError("need at least two cues")
    rng = np.random.Generator(np.random.PCG64(seed))
    unit = base / np.linalg.norm(base)
    while True:
        v = rng.standard_normal(len(base))
        v -= (v @ unit) * unit
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm * np.linalg.norm(base)
