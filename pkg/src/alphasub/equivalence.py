"""Equivalence margin and the two one-sided t-tests on alpha samples."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .bootstrap import ResamplingSchedule, bootstrap_alphas
from .model import AnnotationMatrix, GroupAssignment

DEGENERATE_MARGIN = 1e-4


class DegenerateMarginWarning(UserWarning):
    pass


def t_cdf(t: float, df: float) -> float:
    """Student's t CDF via the regularized incomplete beta function.

    The lower tail for |t| is 0.5 * I_x(df/2, 1/2) with x = df / (df + t^2);
    the upper half follows by symmetry, so cdf(t) + cdf(-t) == 1.
    """
    if df < 1:
        raise ValueError("df must be >= 1")
    if math.isnan(t):
        return math.nan
    if t == 0:
        return 0.5
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    t2 = t * t
    if t2 < df:
        # x close to 1: use the complement for accuracy
        tail = 0.5 * (1.0 - float(betainc(0.5, df / 2.0, t2 / (df + t2))))
    else:
        tail = 0.5 * float(betainc(df / 2.0, 0.5, df / (df + t2)))
    return 1.0 - tail if t > 0 else tail


@dataclass(frozen=True)
class EquivalenceMargin:
    delta: float
    alpha_a: float
    alpha_b: float
    fraction: float

    @property
    def degenerate(self) -> bool:
        return self.delta < DEGENERATE_MARGIN

    @classmethod
    def from_alphas(cls, alpha_a: float, alpha_b: float, fraction: float) -> "EquivalenceMargin":
        if not 0 < fraction <= 1:
            raise ValueError("fraction must lie in (0, 1]")
        margin = cls(abs(alpha_a - alpha_b) * fraction, alpha_a, alpha_b, fraction)
        if margin.degenerate:
            warnings.warn(
                f"equivalence margin {margin.delta:.2e} is below {DEGENERATE_MARGIN}; equivalence is unlikely to pass",
                DegenerateMarginWarning,
                stacklevel=3,
            )
        return margin


def estimate_margin(
    matrix: AnnotationMatrix,
    groups: GroupAssignment,
    fraction: float,
    schedule: ResamplingSchedule,
) -> EquivalenceMargin:
    """Margin from the mean bootstrap alphas of the two human groups."""
    dist_a = bootstrap_alphas(matrix.restrict_annotators(groups.group_a), schedule, "group_a")
    dist_b = bootstrap_alphas(matrix.restrict_annotators(groups.group_b), schedule, "group_b")
    return EquivalenceMargin.from_alphas(dist_a.mean, dist_b.mean, fraction)


@dataclass(frozen=True)
class TostOutcome:
    x1: float
    x2: float
    t1: float
    t2: float
    p1: float
    p2: float
    df: int
    s_pooled: float
    margin: EquivalenceMargin
    equivalent: bool
    sig_level: float = 0.05
    n1: int = 0
    n2: int = 0

    @property
    def p_value(self) -> float:
        return max(self.p1, self.p2)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = asdict(self.margin)
        d["p_value"] = self.p_value
        return d


def _exact_side(gap: float) -> tuple[float, float]:
    if gap == 0:
        return 0.0, 0.5
    return math.copysign(math.inf, gap), (0.0 if gap < 0 else 1.0)


def tost(
    dist_substituted: Sequence[float],
    dist_human: Sequence[float],
    margin: EquivalenceMargin,
    sig_level: float = 0.05,
) -> TostOutcome:
    """Pooled-variance TOST of mean(substituted) against mean(human).

    The difference is taken as human minus substituted, d = x2 - x1, with
    t1 = (d - delta)/se and t2 = (d + delta)/se.  p1 = P(T <= t1) is small
    when the substituted agreement is not more than delta *below* the human
    one; p2 = P(T >= t2) when it is not more than delta above.  Equivalence
    needs both below ``sig_level``.
    """
    a = np.asarray(dist_substituted, dtype=float)
    b = np.asarray(dist_human, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least two values")
    if margin.delta < 0:
        raise ValueError("margin must be non-negative")
    x1, x2 = float(a.mean()), float(b.mean())
    df = n1 + n2 - 2
    if np.ptp(a) == 0 and np.ptp(b) == 0:
        ss = 0.0  # rounding in the mean would otherwise fake a tiny spread
    else:
        ss = float(((a - x1) ** 2).sum() + ((b - x2) ** 2).sum())
    s = math.sqrt(ss / df)
    se = s * math.sqrt(1.0 / n1 + 1.0 / n2)
    diff, d = x2 - x1, margin.delta
    if se > 0:
        t1, t2 = (diff - d) / se, (diff + d) / se
        p1, p2 = t_cdf(t1, df), t_cdf(-t2, df)
    else:
        # no spread: the decision is exact, a point on a bound gets p = 0.5
        t1, p1 = _exact_side(diff - d)
        t2, p2 = _exact_side(diff + d)
        p2 = 1.0 - p2
    equivalent = p1 < sig_level and p2 < sig_level
    return TostOutcome(x1, x2, t1, t2, p1, p2, df, s, margin, equivalent, sig_level, n1, n2)
