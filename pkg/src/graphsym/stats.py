"""Paired statistics used to compare solver runs.

The Student-t tail probability is computed from a self-contained regularized
incomplete beta function (modified Lentz continued fraction, 1e-12
convergence) rather than an external stats dependency, so the p-values are
auditable against an independent oracle.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "TTestResult",
    "regularized_incomplete_beta",
    "t_two_sided_p",
    "paired_t_test",
    "cohens_d_paired",
    "bonferroni",
    "best_of",
]

_CF_EPS = 1e-12
_CF_MAX_ITERS = 500
_FPMIN = 1e-300


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITERS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _CF_EPS:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not (a > 0 and b > 0):
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must be in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    front = math.exp(a * math.log(x) + b * math.log1p(-x) - ln_beta)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|) via the identity with the incomplete beta."""
    if df < 1:
        raise ValueError("df must be >= 1")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


class TTestResult(NamedTuple):
    t: float
    p: float
    df: int
    degenerate: bool = False


def _paired_diffs(x, y) -> np.ndarray:
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or xv.shape != yv.shape:
        raise ValueError("x and y must be equal-length 1-d sequences")
    if xv.size < 2:
        raise ValueError("need at least 2 pairs")
    if not (np.all(np.isfinite(xv)) and np.all(np.isfinite(yv))):
        raise ValueError("inputs must be finite")
    return xv - yv


def paired_t_test(x, y) -> TTestResult:
    """Two-sided paired t-test on per-pair differences x_i - y_i."""
    d = _paired_diffs(x, y)
    n = d.size
    df = n - 1
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t=0.0, p=1.0, df=df, degenerate=False)
        return TTestResult(t=math.copysign(math.inf, mean), p=0.0, df=df, degenerate=True)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t=t, p=t_two_sided_p(t, df), df=df, degenerate=False)


def cohens_d_paired(x, y) -> float:
    """Paired effect size: mean(x - y) / sd(x - y), sample sd (n-1).

    Positive means x exceeds y on average. Zero variance with a nonzero mean
    returns signed infinity.
    """
    d = _paired_diffs(x, y)
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        return 0.0 if mean == 0.0 else math.copysign(math.inf, mean)
    return mean / sd


def bonferroni(alpha: float, m: int) -> float:
    """Per-comparison threshold alpha / m."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if m < 1:
        raise ValueError("m must be >= 1")
    return alpha / m


def best_of(records, group_keys):
    """Per group (tuple of the named attributes), the record with minimal S;
    ties broken by smallest seed. Groups keep first-appearance order."""
    records = list(records)
    if not records:
        raise ValueError("no records")
    keys = list(group_keys)

    def rank(rec):
        s = float(rec.S)
        return (math.isnan(s), s, rec.seed)

    chosen: dict[tuple, object] = {}
    order: list[tuple] = []
    for rec in records:
        key = tuple(getattr(rec, k) for k in keys)
        cur = chosen.get(key)
        if cur is None:
            chosen[key] = rec
            order.append(key)
        elif rank(rec) < rank(cur):
            chosen[key] = rec
    return [chosen[k] for k in order]
