"""Empirical distribution machinery and rank-based VUS/HUM estimators.

The row-wise helpers (``_step_cdf_rows``, ``_smoothed_cdf_rows``) operate on
2-D arrays whose rows are sorted samples. They are shared by the single-sample
public functions and the vectorised bootstrap so both paths produce
identical floating point results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, InputError


@dataclass(frozen=True)
class ClassSample:
    """Observed test results for one class, stored sorted ascending."""

    values: NDArray[np.float64]

    def __init__(self, values: ArrayLike):
        arr = np.sort(np.asarray(values, dtype=float).ravel())
        if arr.size == 0:
            raise InputError("a class sample needs at least one value")
        if not np.all(np.isfinite(arr)):
            raise InputError("class sample contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, ClassSample):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())


@dataclass(frozen=True, eq=True)
class ThreeClassSample:
    """Test results for classes 1, 2 and 3 (increasing disease severity)."""

    class1: ClassSample
    class2: ClassSample
    class3: ClassSample

    @classmethod
    def from_arrays(cls, y1: ArrayLike, y2: ArrayLike, y3: ArrayLike) -> "ThreeClassSample":
        return cls(ClassSample(y1), ClassSample(y2), ClassSample(y3))

    @property
    def classes(self) -> tuple[ClassSample, ClassSample, ClassSample]:
        return (self.class1, self.class2, self.class3)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (self.class1.n, self.class2.n, self.class3.n)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def means_ordered(self) -> bool:
        """True when the sample means satisfy mean1 < mean2 < mean3."""
        m1, m2, m3 = (c.mean for c in self.classes)
        return m1 < m2 < m3


@dataclass(frozen=True)
class TcfTriple:
    """True class fractions (theta1, theta2, theta3)."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)


@dataclass(frozen=True)
class ThresholdPair:
    """Decision thresholds t1 < t2 splitting the marker scale in three."""

    t1: float
    t2: float

    def __post_init__(self):
        if not self.t1 < self.t2:
            raise DomainError(f"thresholds must satisfy t1 < t2, got ({self.t1}, {self.t2})")


# -- row-wise kernels -------------------------------------------------------


def _step_cdf_rows(sorted_rows: NDArray, t: NDArray) -> NDArray:
    """Right-continuous ECDF of each row evaluated at the matching ``t``."""
    n = sorted_rows.shape[1]
    counts = (sorted_rows <= t[:, None]).sum(axis=1)
    return counts / n


def _smoothed_cdf_rows(sorted_rows: NDArray, t: NDArray) -> NDArray:
    """Piecewise-linear ECDF through (distinct order statistic, ECDF value).

    Zero strictly below the minimum and one at or above the maximum. Tied
    order statistics collapse to a single knot carrying the larger ECDF value.
    """
    B, n = sorted_rows.shape
    t = np.asarray(t, dtype=float)
    below = (sorted_rows <= t[:, None]).sum(axis=1)
    out = below / n
    inner = (below > 0) & (below < n)
    if np.any(inner):
        rows = sorted_rows[inner]
        ti = t[inner]
        j = below[inner]
        idx = np.arange(rows.shape[0])
        left = rows[idx, j - 1]
        right = rows[idx, j]
        right_level = (rows <= right[:, None]).sum(axis=1) / n
        left_level = j / n
        frac = (ti - left) / (right - left)
        out[inner] = left_level + frac * (right_level - left_level)
    return out


def _smoothed_quantile_rows(sorted_rows: NDArray, p: float) -> NDArray:
    """Inverse of :func:`_smoothed_cdf_rows` at level ``p`` for every row."""
    B, n = sorted_rows.shape
    k = _order_index(n, p)
    hi = sorted_rows[:, k - 1]
    hi_level = (sorted_rows <= hi[:, None]).sum(axis=1) / n
    m = (sorted_rows < hi[:, None]).sum(axis=1)
    out = hi.copy()
    interp = (m > 0) & (hi_level > p)
    if np.any(interp):
        idx = np.flatnonzero(interp)
        lo = sorted_rows[idx, m[idx] - 1]
        lo_level = m[idx] / n
        frac = (p - lo_level) / (hi_level[idx] - lo_level)
        out[idx] = lo + frac * (hi[idx] - lo)
    return out


def _order_index(n: int, p: float) -> int:
    """1-based index of the smallest order statistic y_(i) with i/n >= p."""
    # rounding guards against n*p landing a hair above an integer
    k = math.ceil(round(n * p, 9))
    return min(max(k, 1), n)


# -- public operations ------------------------------------------------------


def ecdf_eval(s: ClassSample, t: float) -> float:
    """Proportion of sample values less than or equal to ``t``."""
    return int(np.searchsorted(s.values, t, side="right")) / s.n


def ecdf_eval_smoothed(s: ClassSample, t: float) -> float:
    """Continuous, piecewise-linear version of :func:`ecdf_eval`.

    Agrees with the step ECDF at every order statistic and interpolates
    linearly between consecutive distinct order statistics.
    """
    return float(_smoothed_cdf_rows(s.values[None, :], np.array([t], dtype=float))[0])


def empirical_quantile(s: ClassSample, p: float) -> float:
    """Left-continuous inverse of the ECDF, ``inf{t : F(t) >= p}``.

    Parameters
    ----------
    s : ClassSample
    p : float
        Probability in (0, 1].

    Returns
    -------
    float
        The order statistic ``y_(ceil(n p))``.
    """
    if not 0.0 < p <= 1.0:
        raise DomainError(f"quantile level must lie in (0, 1], got {p}", p=p)
    return float(s.values[_order_index(s.n, p) - 1])


def empirical_quantile_smoothed(s: ClassSample, p: float) -> float:
    """Inverse of :func:`ecdf_eval_smoothed`.

    Equals :func:`empirical_quantile` whenever ``n p`` is an integer and the
    sample has no ties; otherwise interpolates between distinct order
    statistics.
    """
    if not 0.0 < p <= 1.0:
        raise DomainError(f"quantile level must lie in (0, 1], got {p}", p=p)
    return float(_smoothed_quantile_rows(s.values[None, :], p)[0])


def p_hat(s2: ClassSample, t: ThresholdPair) -> float:
    """Empirical probability that a class-2 value falls in (t1, t2]."""
    return ecdf_eval(s2, t.t2) - ecdf_eval(s2, t.t1)


def _strict_order_counts(y1: NDArray, y2: NDArray, y3: NDArray) -> tuple[NDArray, NDArray]:
    below = np.searchsorted(y1, y2, side="left")
    above = y3.size - np.searchsorted(y3, y2, side="right")
    return below, above


def vus_estimate(x: ThreeClassSample) -> float:
    """Proportion of triples (y1, y2, y3) with y1 < y2 < y3.

    Each class-2 value contributes (#class1 below it) * (#class3 above it),
    which reproduces the triple sum in O(n log n).
    """
    y1, y2, y3 = (c.values for c in x.classes)
    below, above = _strict_order_counts(y1, y2, y3)
    total = int(np.dot(below.astype(np.int64), above.astype(np.int64)))
    return total / (y1.size * y2.size * y3.size)


def vus_estimate_ties(x: ThreeClassSample) -> float:
    """VUS estimator with 1/2 weight on pairwise ties and 1/6 on triple ties."""
    y1, y2, y3 = (c.values for c in x.classes)
    lt, gt = _strict_order_counts(y1, y2, y3)
    eq1 = np.searchsorted(y1, y2, side="right") - lt
    eq3 = (y3.size - np.searchsorted(y3, y2, side="left")) - gt
    lt, gt, eq1, eq3 = (a.astype(np.int64) for a in (lt, gt, eq1, eq3))
    # weights scaled by 12 keep the sum in exact integer arithmetic
    twelfths = 12 * lt * gt + 6 * eq1 * gt + 6 * lt * eq3 + 2 * eq1 * eq3
    return int(twelfths.sum()) / (12 * y1.size * y2.size * y3.size)


def hum_estimate(samples: Sequence[ClassSample]) -> float:
    """Proportion of M-tuples, one value per class, in strictly increasing order.

    Counts increasing chains class by class: each value in class k carries the
    number of strictly increasing chains through classes 1..k ending at it.
    """
    if len(samples) < 2:
        raise DomainError("HUM needs at least two classes", M=len(samples))
    prev_vals = samples[0].values
    chains = [1] * prev_vals.size
    for s in samples[1:]:
        cum = np.concatenate([[0], np.cumsum(np.asarray(chains, dtype=object))])
        idx = np.searchsorted(prev_vals, s.values, side="left")
        chains = [int(cum[i]) for i in idx]
        prev_vals = s.values
    denom = math.prod(s.n for s in samples)
    return sum(chains) / denom
