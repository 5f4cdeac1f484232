"""Bootstrap calibration of the scale constant in the plug-in statistics.

Each procedure draws ``B`` resamples subject to the ordered-means filter,
evaluates the relevant statistic on every resample and matches the sample
median to the chi-squared(1) median, taken as (7/9)**3.

Replicate ``b`` always draws from ``replicate_rng(seed, b)``, so results do
not depend on how replicates are scheduled. The statistics themselves are
evaluated row-wise on stacked ``(B, n)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .empirical import (
    ThreeClassSample,
    _smoothed_cdf_rows,
    _smoothed_quantile_rows,
    empirical_quantile,
    p_hat,
    ThresholdPair,
    vus_estimate,
    vus_estimate_ties,
)
from .errors import (
    BoundaryEstimateError,
    DegenerateScaleError,
    DomainError,
    OrderingInfeasibleError,
)
from .pivots import binomial_deviance, plugin_thresholds

MEDIAN_CHI2_1 = (7.0 / 9.0) ** 3
MAX_REJECTIONS = 1000
# medians at or below this are rounding residue of an exact zero
ZERO_MEDIAN = 1e-12

Resampler = Callable[[ThreeClassSample, np.random.Generator], "tuple[ThreeClassSample, int]"]


@dataclass(frozen=True)
class ScaleEstimate:
    """Bootstrap estimate of the scale constant and its provenance."""

    w_hat: float
    B_requested: int
    B_accepted: int
    rejected_ordering: int
    median_value: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d: dict) -> "ScaleEstimate":
        return cls(**d)


def replicate_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream identified by ``(seed, *key)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


def _draw_ordered(
    arrays: Sequence[NDArray], rng: np.random.Generator, max_rejections: int = MAX_REJECTIONS
) -> tuple[list[NDArray], int]:
    rejected = 0
    while True:
        draws = [a[rng.integers(0, a.size, a.size)] for a in arrays]
        means = [d.mean() for d in draws]
        if all(m0 < m1 for m0, m1 in zip(means, means[1:])):
            return draws, rejected
        rejected += 1
        if rejected >= max_rejections:
            raise OrderingInfeasibleError(
                f"{max_rejections} consecutive resamples violated the mean ordering",
                rejected=rejected,
            )


def resample_ordered(
    x: ThreeClassSample,
    rng: np.random.Generator,
    classes: Sequence[int] = (1, 2, 3),
    max_rejections: int = MAX_REJECTIONS,
) -> tuple[ThreeClassSample, int]:
    """Draw a with-replacement resample whose class means are ordered.

    Only the classes listed in ``classes`` (1-based) are resampled; the rest
    are passed through unchanged and do not enter the ordering check.

    Returns
    -------
    (ThreeClassSample, int)
        The accepted resample and the number of rejected draws before it.
    """
    idx = [c - 1 for c in classes]
    draws, rejected = _draw_ordered([x.classes[i].values for i in idx], rng, max_rejections)
    arrays = [c.values for c in x.classes]
    for i, d in zip(idx, draws):
        arrays[i] = d
    return ThreeClassSample.from_arrays(*arrays), rejected


def _bootstrap_rows(
    x: ThreeClassSample,
    B: int,
    seed: int,
    classes: Sequence[int],
    resampler: Resampler | None,
) -> tuple[dict[int, NDArray], int]:
    rows = {c: np.empty((B, x.classes[c - 1].n)) for c in classes}
    rejected = 0
    arrays = [x.classes[c - 1].values for c in classes]
    for b in range(B):
        rng = replicate_rng(seed, b)
        if resampler is None:
            draws, rej = _draw_ordered(arrays, rng)
        else:
            xb, rej = resampler(x, rng)
            draws = [xb.classes[c - 1].values for c in classes]
        rejected += rej
        for c, d in zip(classes, draws):
            rows[c][b] = d
    for c in classes:
        rows[c].sort(axis=1)
    return rows, rejected


def _check_B(B: int):
    if B < 2:
        raise DomainError(f"need at least 2 bootstrap replicates, got {B}", B=B)


def _check_open(name: str, v: float):
    if not 0.0 < v < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {v}", **{name: v})


def _bracket_rows(rows: NDArray, t: NDArray) -> NDArray:
    return (rows[:, 0] <= t) & (t < rows[:, -1])


def bootstrap_pivots_tcf2(
    x: ThreeClassSample,
    theta1: float,
    theta3: float,
    B: int,
    seed: int,
    resampler: Resampler | None = None,
) -> tuple[NDArray, int]:
    """Bootstrap replicates of the TCF2 plug-in statistic at the estimate.

    Each replicate re-estimates both thresholds as quantiles of the smoothed
    ECDFs and evaluates the statistic with smoothed ECDFs at the full-sample
    estimate of TCF2.

    Returns
    -------
    (ndarray, int)
        ``B`` statistic values and the total number of rejected resamples.
    """
    _check_B(B)
    _check_open("theta1", theta1)
    _check_open("theta3", theta3)
    t1, t2 = plugin_thresholds(x, theta1, theta3)
    if t1 >= t2:
        raise DegenerateScaleError("plug-in thresholds cross on the observed data", t1=t1, t2=t2)
    theta2_hat = p_hat(x.class2, ThresholdPair(t1, t2))
    rows, rejected = _bootstrap_rows(x, B, seed, (1, 2, 3), resampler)
    n1, n2, n3 = x.sizes
    t1b = _smoothed_quantile_rows(rows[1], theta1)
    t2b = _smoothed_quantile_rows(rows[3], 1.0 - theta3)
    f1 = _smoothed_cdf_rows(rows[1], t1b)
    f3 = _smoothed_cdf_rows(rows[3], t2b)
    p2 = _smoothed_cdf_rows(rows[2], t2b) - _smoothed_cdf_rows(rows[2], t1b)
    ok = (t1b < t2b) & (_bracket_rows(rows[2], t1b) | _bracket_rows(rows[2], t2b))
    p2 = np.where(ok, p2, 0.5)
    values = (
        binomial_deviance(n1, f1, theta1)
        + binomial_deviance(n2, p2, theta2_hat)
        + binomial_deviance(n3, f3, 1.0 - theta3)
    )
    return np.where(ok, values, np.inf), rejected


def _vus_rows(r1: NDArray, r2: NDArray, r3: NDArray, ties: bool) -> NDArray:
    lt = (r1[:, None, :] < r2[:, :, None]).sum(axis=2).astype(np.int64)
    gt = (r3[:, None, :] > r2[:, :, None]).sum(axis=2).astype(np.int64)
    denom = r1.shape[1] * r2.shape[1] * r3.shape[1]
    if not ties:
        return (lt * gt).sum(axis=1) / denom
    eq1 = (r1[:, None, :] == r2[:, :, None]).sum(axis=2).astype(np.int64)
    eq3 = (r3[:, None, :] == r2[:, :, None]).sum(axis=2).astype(np.int64)
    twelfths = 12 * lt * gt + 6 * eq1 * gt + 6 * lt * eq3 + 2 * eq1 * eq3
    return twelfths.sum(axis=1) / (12 * denom)


def bootstrap_pivots_vus(
    x: ThreeClassSample,
    B: int,
    seed: int,
    ties: bool = False,
    resampler: Resampler | None = None,
) -> tuple[NDArray, int]:
    """Bootstrap replicates of the VUS pivot evaluated at the full-sample estimate."""
    _check_B(B)
    gamma_hat = vus_estimate_ties(x) if ties else vus_estimate(x)
    if gamma_hat <= 0.0 or gamma_hat >= 1.0:
        raise BoundaryEstimateError(
            "VUS estimate is on the boundary; try the ties estimator or more data",
            gamma_hat=gamma_hat,
        )
    rows, rejected = _bootstrap_rows(x, B, seed, (1, 2, 3), resampler)
    g = _vus_rows(rows[1], rows[2], rows[3], ties)
    inner = (g > 0.0) & (g < 1.0)
    # boundary replicates are infinite, as in ell_vus
    values = np.where(inner, binomial_deviance(x.n, np.where(inner, g, 0.5), gamma_hat), np.inf)
    return values, rejected


def bootstrap_pivots_pair(
    x: ThreeClassSample,
    theta1: float,
    t2: float,
    B: int,
    seed: int,
    resampler: Resampler | None = None,
) -> tuple[NDArray, int]:
    """Bootstrap replicates of the class-2 deviance with t1 re-estimated.

    Only classes 1 and 2 are resampled and only their means are checked
    for ordering.
    """
    _check_B(B)
    _check_open("theta1", theta1)
    t1 = empirical_quantile(x.class1, theta1)
    if t1 >= t2:
        raise DegenerateScaleError("estimated t1 is not below t2", t1=t1, t2=t2)
    theta2_hat = p_hat(x.class2, ThresholdPair(t1, t2))
    rows, rejected = _bootstrap_rows(x, B, seed, (1, 2), resampler)
    n2 = x.sizes[1]
    t1b = _smoothed_quantile_rows(rows[1], theta1)
    t2v = np.full(B, float(t2))
    p2 = _smoothed_cdf_rows(rows[2], t2v) - _smoothed_cdf_rows(rows[2], t1b)
    ok = (t1b < t2) & (_bracket_rows(rows[2], t1b) | _bracket_rows(rows[2], t2v))
    values = binomial_deviance(n2, np.where(ok, p2, 0.5), theta2_hat)
    return np.where(ok, values, np.inf), rejected


def scale_from_median(values: NDArray, inverted: bool = False) -> tuple[float, float]:
    """Scale estimate from bootstrap statistic values.

    Returns ``((7/9)**3 / median, median)``, or ``(median / (7/9)**3, median)``
    when ``inverted``. Infinite values sort last; an even-length median is
    the mean of the two central order statistics.
    """
    med = float(np.median(np.asarray(values, dtype=float)))
    if not np.isfinite(med) or med <= ZERO_MEDIAN:
        raise DegenerateScaleError(f"bootstrap median is {med}; scale undefined", median=med)
    w = med / MEDIAN_CHI2_1 if inverted else MEDIAN_CHI2_1 / med
    return w, med


def _estimate(values: NDArray, rejected: int, B: int, inverted: bool = False) -> ScaleEstimate:
    w, med = scale_from_median(values, inverted)
    return ScaleEstimate(
        w_hat=w, B_requested=B, B_accepted=int(values.size), rejected_ordering=rejected, median_value=med
    )


def estimate_w_tcf2(
    x: ThreeClassSample,
    theta1: float,
    theta3: float,
    B: int,
    seed: int,
    resampler: Resampler | None = None,
) -> ScaleEstimate:
    """Scale constant for the TCF2 interval, ``(7/9)**3 / median``."""
    values, rejected = bootstrap_pivots_tcf2(x, theta1, theta3, B, seed, resampler)
    return _estimate(values, rejected, B)


def estimate_w_vus(
    x: ThreeClassSample,
    B: int,
    seed: int,
    ties: bool = False,
    resampler: Resampler | None = None,
) -> ScaleEstimate:
    """Scale constant for the VUS interval, ``(7/9)**3 / median``."""
    values, rejected = bootstrap_pivots_vus(x, B, seed, ties, resampler)
    return _estimate(values, rejected, B)


def estimate_w_pair(
    x: ThreeClassSample,
    theta1: float,
    t2: float,
    B: int,
    seed: int,
    resampler: Resampler | None = None,
) -> ScaleEstimate:
    """Scale constant for the (TCF2, TCF3) region, ``median / (7/9)**3``.

    The ratio is inverted relative to the other two procedures because
    here the constant multiplies the class-2 chi-squared component of the
    limiting mixture.
    """
    values, rejected = bootstrap_pivots_pair(x, theta1, t2, B, seed, resampler)
    return _estimate(values, rejected, B, inverted=True)


def mc_quantile_mixture(w_hat: float, alpha: float, M: int = 1000, seed: int = 0) -> float:
    """Monte Carlo (1 - alpha) quantile of ``w_hat * U1 + U2``, U1, U2 iid chi2(1).

    Uses numpy's default (linear interpolation) sample quantile.
    """
    _check_open("alpha", alpha)
    if M < 100:
        raise DomainError(f"need at least 100 Monte Carlo draws, got {M}", M=M)
    if w_hat < 0 or not np.isfinite(w_hat):
        raise DomainError(f"w_hat must be finite and non-negative, got {w_hat}", w_hat=w_hat)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    u = rng.standard_normal((2, M)) ** 2
    return float(np.quantile(w_hat * u[0] + u[1], 1.0 - alpha))
