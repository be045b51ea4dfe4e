"""Study planning: corpus size, first-order alpha change and group size."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .alpha import (
    AlphaUndefined,
    delta_table,
    item_coincidences,
    item_histograms,
    krippendorff_alpha,
)
from .model import MISSING, AnnotationMatrix, Scale
from .substitution import CandidateAnnotations, SubstitutionGroup, substitution_sweep

CORPUS_FACTOR = 2.5  # bootstrap samples of 40% of the corpus


@dataclass(frozen=True)
class StudyPlan:
    z: float
    alpha_min: float
    p_c: float
    N_min: int
    n_min: int
    N_exact: float


def sample_size(z: float, alpha_min: float, p_c: float) -> StudyPlan:
    """Bloch-Kraemer minimum items per bootstrap sample, and the corpus size.

    ``z`` enters the formula as given.  Note that z = 0.95 reproduces the
    published N = 32; a two-sided 95% normal quantile would be 1.96.
    """
    if not z > 0:
        raise ValueError("z must be positive")
    if not 0 <= alpha_min < 1:
        raise ValueError("alpha_min must lie in [0, 1)")
    if not 0 < p_c < 1:
        raise ValueError("p_c must lie in (0, 1)")
    raw = z**2 * ((1 + alpha_min) * (3 - alpha_min)) / (4 * (1 - alpha_min) * p_c * (1 - p_c))
    # guard against 3.0000000000000004 style ceilings
    N = math.ceil(round(raw, 9))
    return StudyPlan(z, alpha_min, p_c, N, math.ceil(round(CORPUS_FACTOR * N, 9)), raw)


# -- first-order alpha change --------------------------------------------------


@dataclass(frozen=True)
class AlphaChangeEstimate:
    delta_d_o: float
    delta_d_e: float
    delta_alpha: float
    exact_delta_alpha: float | None = None
    d_o: float = math.nan
    d_e: float = math.nan


def _ordinal_delta_gradient(marginals: np.ndarray) -> np.ndarray:
    """d delta[c, c'] / d n_g as an (A, A, A) array (last axis is g)."""
    size = len(marginals)
    grad = np.zeros((size, size, size))
    for c in range(size):
        for d in range(size):
            if c == d:
                continue
            lo, hi = min(c, d), max(c, d)
            s = marginals[lo : hi + 1].sum() - (marginals[c] + marginals[d]) / 2.0
            w = np.zeros(size)
            w[lo : hi + 1] = 1.0
            w[c] -= 0.5
            w[d] -= 0.5
            grad[c, d] = 2.0 * s * w
    return grad


def _mean_disagreement(codes_k: np.ndarray, j: int, label: int, deltas: np.ndarray) -> float:
    others = np.delete(codes_k, j)
    others = others[others != MISSING]
    if len(others) == 0:
        return 0.0
    return float(deltas[label, others].mean())


def predict_alpha_change(base: AnnotationMatrix, group: SubstitutionGroup) -> AlphaChangeEstimate:
    """First-order prediction of the alpha change caused by a substitution.

    dD_o = (2 / n..) * sum_k (dbar_new,k - dbar_old,k), where dbar is the mean
    difference between the annotator's label and the other present labels on
    item k and n.. is the number of pairable values (n * i for a dense matrix).
    dD_e is the gradient of D_e along the exact shift in label marginals; on
    a nominal scale this is -2 n../(n..-1) sum_c p_c dp_c.  Ordinal differences
    depend on the marginals themselves, and that dependence is linearised too.
    """
    res = krippendorff_alpha(base)
    d_o, d_e, total = res.d_observed, res.d_expected, res.pairable_values
    j = base.annotator_index(group.replaced_annotator)
    hist_old = item_histograms(base)
    hist_new = item_histograms(group.result)
    pairable = hist_old.sum(axis=1) >= 2
    n_old = hist_old[pairable].sum(axis=0)
    dn = hist_new[pairable].sum(axis=0) - n_old

    deltas = delta_table(base.scale, base.values, n_old)
    dbar = 0.0
    for k in np.flatnonzero(pairable):
        old, new = base.codes[k, j], group.result.codes[k, j]
        if old == MISSING or old == new:
            continue
        dbar += _mean_disagreement(base.codes[k], j, new, deltas) - _mean_disagreement(
            base.codes[k], j, old, deltas
        )
    delta_d_o = 2.0 * dbar / total
    norm = total * (total - 1.0)
    delta_d_e = 2.0 * float(dn @ deltas @ n_old) / norm

    if base.scale is Scale.ORDINAL:
        d_delta = _ordinal_delta_gradient(n_old) @ dn
        counts = item_coincidences(hist_old).sum(axis=0)
        delta_d_o += float((counts * d_delta).sum()) / total
        delta_d_e += float(n_old @ d_delta @ n_old) / norm

    delta_alpha = -delta_d_o / d_e + d_o / d_e**2 * delta_d_e
    try:
        exact = krippendorff_alpha(group.result).alpha - res.alpha
    except AlphaUndefined:
        exact = None
    return AlphaChangeEstimate(delta_d_o, delta_d_e, delta_alpha, exact, d_o, d_e)


# -- group size ---------------------------------------------------------------


def group_size_curve(
    population: AnnotationMatrix,
    sizes: Sequence[int],
    candidate: CandidateAnnotations,
    seed: int,
    repeats: int = 1,
) -> list[tuple[int, float]]:
    """Mean |alpha change| from single substitutions, per annotator-group size.

    For each size, ``repeats`` annotator subsets are drawn (PCG64 seeded with
    ``seed``); each subset gets the full substitution sweep.  Subsets where
    alpha is undefined are redrawn up to 20 times before giving up.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    curve = []
    for size in sizes:
        if size < 2:
            raise ValueError("group sizes must be >= 2")
        if size > population.n_annotators:
            raise ValueError(f"group size {size} exceeds {population.n_annotators} annotators")
        changes: list[float] = []
        for _ in range(repeats):
            for _attempt in range(20):
                pick = sorted(rng.choice(population.n_annotators, size=size, replace=False))
                sub = _subset(population, pick)
                if sub is None:
                    continue
                try:
                    base_alpha = krippendorff_alpha(sub).alpha
                    changes.extend(
                        abs(krippendorff_alpha(g.result).alpha - base_alpha)
                        for g in substitution_sweep(sub, sub.annotators, candidate)
                    )
                except AlphaUndefined:
                    continue
                break
            else:
                raise AlphaUndefined(f"could not draw a usable annotator group of size {size}")
        curve.append((int(size), float(np.mean(changes))))
    return curve


def _subset(population: AnnotationMatrix, cols: Sequence[int]) -> AnnotationMatrix | None:
    names = [population.annotators[c] for c in cols]
    codes = population.codes[:, cols]
    keep = np.flatnonzero((codes != MISSING).any(axis=1))
    if not np.any((codes != MISSING).sum(axis=1) >= 2):
        return None
    return AnnotationMatrix(
        tuple(population.items[k] for k in keep), tuple(names), codes[keep], population.scale, population.alphabet
    )


@dataclass(frozen=True)
class ElbowResult:
    """L-method split.

    ``elbow_index`` is the number of points in the left segment (so the
    1-based position of the knee); ``split_errors[s]`` is the weighted
    two-line RMSE for split ``s`` (keys run from 2 to len(curve) - 2).
    """

    curve: tuple[tuple[float, float], ...]
    elbow_index: int
    split_errors: dict[int, float] = field(repr=False)
    degenerate: bool = False

    @property
    def elbow_x(self) -> float:
        return self.curve[self.elbow_index - 1][0]


def _line_rmse(x: np.ndarray, y: np.ndarray) -> float:
    xm, ym = x.mean(), y.mean()
    sxx = ((x - xm) ** 2).sum()
    slope = ((x - xm) * (y - ym)).sum() / sxx
    resid = y - (ym + slope * (x - xm))
    return math.sqrt(float((resid**2).mean()))


def l_method_elbow(curve: Sequence[tuple[float, float]], rtol: float = 1e-9) -> ElbowResult:
    """Split the curve into two least-squares lines with minimum weighted RMSE.

    Score for split s (left = first s points) is
    s/b * RMSE_left + (b-s)/b * RMSE_right.  Ties go to the smaller s.  When
    all scores agree within ``rtol`` of the curve's y-range the curve has no
    knee and the result is flagged ``degenerate``.
    """
    pts = [(float(x), float(y)) for x, y in curve]
    b = len(pts)
    if b < 4:
        raise ValueError("the L-method needs at least 4 points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(np.diff(x) <= 0):
        raise ValueError("x values must be strictly increasing")
    errors = {}
    for s in range(2, b - 1):
        errors[s] = s / b * _line_rmse(x[:s], y[:s]) + (b - s) / b * _line_rmse(x[s:], y[s:])
    best = min(errors.values())
    scale = max(float(np.ptp(y)), 1e-300)
    tol = rtol * scale
    elbow = min(s for s, e in errors.items() if e <= best + tol)
    degenerate = max(errors.values()) - best <= tol
    return ElbowResult(tuple(pts), elbow, errors, degenerate)
