"""Closed-form empirical log-likelihood ratio statistics.

For fixed thresholds the three-sample empirical likelihood for a TCF triple
profiles into three independent binomial deviances, one per class. Every
statistic here is a variation on that sum with some thresholds replaced by
empirical quantiles. All functions return plain floats, ``inf`` signalling a
hypothesis the data cannot support.
"""

from __future__ import annotations

import numpy as np
from scipy.special import rel_entr

from .empirical import (
    ClassSample,
    TcfTriple,
    ThreeClassSample,
    ThresholdPair,
    _smoothed_cdf_rows,
    _step_cdf_rows,
    empirical_quantile,
)
from .errors import DomainError

NEG_TOL = 1e-12


def binomial_deviance(n: int, phat, theta):
    """Likelihood-ratio deviance of a binomial proportion.

    ``2 n [phat log(phat/theta) + (1-phat) log((1-phat)/(1-theta))]`` with
    ``0 log 0 = 0``. Broadcasts over array arguments.
    """
    phat = np.asarray(phat, dtype=float)
    theta = np.asarray(theta, dtype=float)
    dev = 2.0 * n * (rel_entr(phat, theta) + rel_entr(1.0 - phat, 1.0 - theta))
    dev = np.where((dev < 0) & (dev > -NEG_TOL), 0.0, dev)
    return dev if dev.ndim else float(dev)


def _in_bracket(t: float, s: ClassSample) -> bool:
    return bool(s.values[0] <= t < s.values[-1])


def domain_failures(x: ThreeClassSample, t1: float, t2: float, check_class1: bool = True) -> list[str]:
    """Names of the bracket conditions violated by ``(t1, t2)``; empty if none."""
    bad = []
    if check_class1 and not _in_bracket(t1, x.class1):
        bad.append("t1 outside [min, max) of class 1")
    if not (_in_bracket(t1, x.class2) or _in_bracket(t2, x.class2)):
        bad.append("neither t1 nor t2 inside [min, max) of class 2")
    if not _in_bracket(t2, x.class3):
        bad.append("t2 outside [min, max) of class 3")
    return bad


def empirical_fractions(x: ThreeClassSample, t1: float, t2: float, smoothed: bool = False) -> tuple[float, float, float]:
    """(F1(t1), F2(t2) - F2(t1), F3(t2)) from step or smoothed ECDFs.

    Note the third entry is the class-3 CDF, not the TCF ``1 - F3(t2)``.
    """
    cdf = _smoothed_cdf_rows if smoothed else _step_cdf_rows
    f1 = cdf(x.class1.values[None, :], np.array([t1]))[0]
    f2 = cdf(np.vstack([x.class2.values, x.class2.values]), np.array([t1, t2]))
    f3 = cdf(x.class3.values[None, :], np.array([t2]))[0]
    return float(f1), float(f2[1] - f2[0]), float(f3)


def _three_deviances(x: ThreeClassSample, fr: tuple[float, float, float], theta1, theta2, theta3):
    f1, p2, f3 = fr
    n1, n2, n3 = x.sizes
    return (
        binomial_deviance(n1, f1, theta1)
        + binomial_deviance(n2, p2, theta2)
        + binomial_deviance(n3, f3, 1.0 - np.asarray(theta3, dtype=float))
    )


def _empty_window(p2: float, smoothed: bool) -> bool:
    # with step ECDFs an empty (t1, t2] window means no weights can meet theta2 > 0
    return (not smoothed) and p2 <= 0.0


def ell_tcf_triple(x: ThreeClassSample, t: ThresholdPair, theta: TcfTriple, smoothed: bool = False) -> float:
    """Empirical log-likelihood ratio for a TCF triple at fixed thresholds.

    Asymptotically chi-squared with three degrees of freedom at the true
    triple. Returns ``inf`` when the thresholds violate the bracket
    conditions or the class-2 window is empty.
    """
    if not t.t1 < t.t2:
        raise DomainError("t1 must be strictly below t2")
    if domain_failures(x, t.t1, t.t2):
        return float("inf")
    fr = empirical_fractions(x, t.t1, t.t2, smoothed)
    if _empty_window(fr[1], smoothed) and theta.theta2 > 0:
        return float("inf")
    return float(_three_deviances(x, fr, *theta.as_tuple()))


def plugin_thresholds(x: ThreeClassSample, theta1: float, theta3: float) -> tuple[float, float]:
    """Quantile estimates ``t1 = F1^-1(theta1)`` and ``t2 = F3^-1(1 - theta3)``."""
    return empirical_quantile(x.class1, theta1), empirical_quantile(x.class3, 1.0 - theta3)


def tcf2_diagnostic(x: ThreeClassSample, theta1: float, theta3: float) -> str | None:
    """Why :func:`ell_star_tcf2` is infinite for every theta2, or None."""
    t1, t2 = plugin_thresholds(x, theta1, theta3)
    if t1 >= t2:
        return "thresholds_crossed"
    if not (_in_bracket(t1, x.class2) or _in_bracket(t2, x.class2)):
        return "class2_bracket"
    return None


def _check_open(name: str, v: float):
    if not 0.0 < v < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {v}", **{name: v})


def ell_star_tcf2(
    x: ThreeClassSample,
    theta1: float,
    theta2,
    theta3: float,
    smoothed: bool = False,
):
    """Plug-in statistic for TCF2 with TCF1 and TCF3 held fixed.

    Thresholds are replaced by ``F1^-1(theta1)`` and ``F3^-1(1 - theta3)``.
    ``theta2`` may be an array, in which case an array is returned.
    Returns ``inf`` when the estimated thresholds cross or neither lies in
    the class-2 bracket; see :func:`tcf2_diagnostic`.
    """
    _check_open("theta1", theta1)
    _check_open("theta3", theta3)
    theta2 = np.asarray(theta2, dtype=float)
    t1, t2 = plugin_thresholds(x, theta1, theta3)
    if t1 >= t2 or not (_in_bracket(t1, x.class2) or _in_bracket(t2, x.class2)):
        out = np.full(theta2.shape, np.inf)
    else:
        fr = empirical_fractions(x, t1, t2, smoothed)
        out = np.asarray(_three_deviances(x, fr, theta1, theta2, theta3), dtype=float)
        if _empty_window(fr[1], smoothed):
            out = np.where(theta2 > 0, np.inf, out)
    return out if out.ndim else float(out)


def ell_vus(gamma_hat: float, n: int, gamma):
    """EL-type pivot for the VUS (or HUM) treated as a proportion over n subjects.

    ``n`` is the total sample size. With a boundary estimate the pivot is
    ``inf`` everywhere except at ``gamma == gamma_hat``.
    """
    gamma = np.asarray(gamma, dtype=float)
    if np.any((gamma <= 0) | (gamma >= 1)):
        raise DomainError("hypothesised VUS must lie in (0, 1)")
    if gamma_hat <= 0.0 or gamma_hat >= 1.0:
        out = np.where(gamma == gamma_hat, 0.0, np.inf)
        return out if out.ndim else float(out)
    return binomial_deviance(n, gamma_hat, gamma)


def ell_star2_pair(
    x: ThreeClassSample,
    theta1: float,
    theta2,
    theta3,
    t2: float,
    smoothed: bool = False,
):
    """Plug-in statistic for (TCF2, TCF3) with TCF1 fixed and t2 given.

    ``theta2`` and ``theta3`` broadcast against each other. Requires
    ``t1 = F1^-1(theta1) < t2``; otherwise every value is ``inf``.
    """
    _check_open("theta1", theta1)
    theta2 = np.asarray(theta2, dtype=float)
    theta3 = np.asarray(theta3, dtype=float)
    shape = np.broadcast(theta2, theta3).shape
    t1 = empirical_quantile(x.class1, theta1)
    if t1 >= t2 or domain_failures(x, t1, t2, check_class1=False):
        out = np.full(shape, np.inf)
    else:
        fr = empirical_fractions(x, t1, t2, smoothed)
        out = np.asarray(_three_deviances(x, fr, theta1, theta2, theta3), dtype=float)
        out = np.broadcast_to(out, shape).copy()
        if _empty_window(fr[1], smoothed):
            out = np.where(np.broadcast_to(theta2, shape) > 0, np.inf, out)
    return out if out.ndim else float(out)


def ell_plus_symmetric(x: ThreeClassSample, theta: float, t: ThresholdPair, smoothed: bool = False) -> float:
    """Statistic for the symmetric point, where all three TCFs share ``theta``."""
    _check_open("theta", theta)
    return ell_tcf_triple(x, t, TcfTriple(theta, theta, theta), smoothed=smoothed)

