"""Krippendorff's alpha over the coincidence matrix.

Everything is computed from per-item label histograms, which lets the
bootstrap evaluate many item-multisets at once: a resample is just a vector of
item multiplicities, and the coincidence matrix of the resample is that vector
times the stacked per-item coincidence tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MISSING, AnnotationMatrix, DataError, Scale

# D_e at or below this fraction of the mean off-diagonal difference counts as zero.
NO_VARIATION_RTOL = 1e-12


class AlphaUndefined(DataError):
    """Alpha cannot be computed for this data."""


class NoPairableValues(AlphaUndefined):
    """No item carries two or more labels."""


class NoVariation(AlphaUndefined):
    """All pairable labels are identical, so expected disagreement is zero."""


@dataclass(frozen=True)
class CoincidenceMatrix:
    counts: np.ndarray
    marginals: np.ndarray
    total: float


@dataclass(frozen=True)
class AlphaResult:
    alpha: float
    d_observed: float
    d_expected: float
    pairable_values: float


def item_histograms(matrix: AnnotationMatrix) -> np.ndarray:
    """(n_items, |alphabet|) counts of each label per item."""
    n, size = matrix.n_items, len(matrix.alphabet)
    hist = np.zeros((n, size), dtype=float)
    rows, cols = np.nonzero(matrix.codes != MISSING)
    np.add.at(hist, (rows, matrix.codes[rows, cols]), 1.0)
    return hist


def item_coincidences(hist: np.ndarray) -> np.ndarray:
    """Per-item coincidence tables, shape (n_items, A, A).

    Each ordered pair of distinct labelled slots on item k adds 1/(m_k - 1);
    with label counts h that is (h h^T - diag(h)) / (m_k - 1).
    """
    m = hist.sum(axis=1)
    outer = hist[:, :, None] * hist[:, None, :]
    idx = np.arange(hist.shape[1])
    outer[:, idx, idx] -= hist
    scale = np.zeros_like(m)
    pairable = m >= 2
    scale[pairable] = 1.0 / (m[pairable] - 1.0)
    return outer * scale[:, None, None]


def coincidences(matrix: AnnotationMatrix) -> CoincidenceMatrix:
    counts = item_coincidences(item_histograms(matrix)).sum(axis=0)
    marginals = counts.sum(axis=1)
    total = float(marginals.sum())
    if total <= 0:
        raise NoPairableValues("no item has two or more labels")
    return CoincidenceMatrix(counts, marginals, total)


def ordinal_deltas(marginals: np.ndarray) -> np.ndarray:
    """Ordinal difference tables for one or many marginal vectors (..., A) -> (..., A, A)."""
    marginals = np.asarray(marginals, dtype=float)
    cum = np.cumsum(marginals, axis=-1)
    # between[c, c'] = sum of n_g for g from min(c,c') to max(c,c') inclusive
    lo_excl = cum - marginals
    between = np.maximum(cum[..., None, :] - lo_excl[..., :, None], cum[..., :, None] - lo_excl[..., None, :])
    half = (marginals[..., :, None] + marginals[..., None, :]) / 2.0
    out = (between - half) ** 2
    size = marginals.shape[-1]
    out[..., np.arange(size), np.arange(size)] = 0.0
    return out


def delta_table(scale: Scale, values: np.ndarray, marginals: np.ndarray | None = None) -> np.ndarray:
    """Full |alphabet| x |alphabet| difference table for a scale."""
    scale = Scale(scale)
    size = len(values)
    if scale is Scale.NOMINAL:
        return 1.0 - np.eye(size)
    if scale is Scale.INTERVAL:
        v = np.asarray(values, dtype=float)
        return (v[:, None] - v[None, :]) ** 2
    if marginals is None:
        raise ValueError("ordinal differences need label marginals")
    return ordinal_deltas(marginals)


def delta(scale: Scale, c: int, c_prime: int, marginals=None, values=None) -> float:
    """Difference between two label indices.

    ``values`` are the interval magnitudes (defaults to the indices);
    ``marginals`` are the coincidence marginals, required for ordinal.
    """
    scale = Scale(scale)
    if c == c_prime:
        return 0.0
    if scale is Scale.NOMINAL:
        return 1.0
    if scale is Scale.INTERVAL:
        a = float(values[c]) if values is not None else float(c)
        b = float(values[c_prime]) if values is not None else float(c_prime)
        return (a - b) ** 2
    lo, hi = min(c, c_prime), max(c, c_prime)
    n = np.asarray(marginals, dtype=float)
    return float((n[lo : hi + 1].sum() - (n[c] + n[c_prime]) / 2.0) ** 2)


def alpha_batch(
    coinc_items: np.ndarray, weights: np.ndarray, scale: Scale, values: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Alpha for many item-multisets at once.

    ``coinc_items`` is (n, A, A) from :func:`item_coincidences`; ``weights`` is
    (B, n) item multiplicities.  Returns (alpha, D_o, D_e, n..) arrays of
    length B; alpha is NaN where undefined (no pairable values or D_e = 0).
    """
    n, size, _ = coinc_items.shape
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    counts = (weights @ coinc_items.reshape(n, size * size)).reshape(-1, size, size)
    marginals = counts.sum(axis=2)
    total = marginals.sum(axis=1)
    scale = Scale(scale)
    if scale is Scale.ORDINAL:
        deltas = ordinal_deltas(marginals)
    else:
        deltas = np.broadcast_to(delta_table(scale, values), counts.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        d_obs = (counts * deltas).sum(axis=(1, 2)) / total
        expected_mass = np.einsum("bc,bcd,bd->b", marginals, deltas, marginals)
        d_exp = expected_mass / (total * (total - 1.0))
        off = ~np.eye(size, dtype=bool)
        mean_delta = deltas[:, off].mean(axis=1) if size > 1 else np.zeros(len(total))
        alpha = 1.0 - d_obs / d_exp
    undefined = (total < 2) | (d_exp <= NO_VARIATION_RTOL * mean_delta) | (mean_delta <= 0)
    alpha = np.where(undefined, np.nan, alpha)
    return alpha, d_obs, d_exp, total


def krippendorff_alpha(matrix: AnnotationMatrix) -> AlphaResult:
    """Alpha = 1 - D_o / D_e for the whole matrix.

    Raises :class:`NoPairableValues` or :class:`NoVariation` when alpha is
    undefined; no number is ever returned for those cases.
    """
    coinc = item_coincidences(item_histograms(matrix))
    alpha, d_obs, d_exp, total = alpha_batch(coinc, np.ones((1, matrix.n_items)), matrix.scale, matrix.values)
    if total[0] < 2:
        raise NoPairableValues("no item has two or more labels")
    if np.isnan(alpha[0]):
        raise NoVariation("all pairable labels are identical; alpha is undefined")
    return AlphaResult(float(alpha[0]), float(d_obs[0]), float(d_exp[0]), float(total[0]))


def alpha_or_none(matrix: AnnotationMatrix) -> float | None:
    try:
        return krippendorff_alpha(matrix).alpha
    except AlphaUndefined:
        return None
