"""Chi-squared quantiles by inverting the regularised lower incomplete gamma."""

from __future__ import annotations

import math

from scipy.special import gammainc, gammaincc, gammaln

from .errors import DomainError


def _wilson_hilferty(df: float, p: float) -> float:
    z = _normal_quantile(p)
    h = 2.0 / (9.0 * df)
    return df * max(1.0 - h + z * math.sqrt(h), 1e-3) ** 3


def _normal_quantile(p: float) -> float:
    # Acklam's rational approximation; only used as a starting point
    a = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
         1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
    b = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
         6.680131188771972e01, -1.328068155288572e01)
    c = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
         -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
    d = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
         3.754408661907416e00)
    lo = 0.02425
    if p < lo:
        q = math.sqrt(-2 * math.log(p))
        return (((((c[0]*q + c[1])*q + c[2])*q + c[3])*q + c[4])*q + c[5]) / \
            ((((d[0]*q + d[1])*q + d[2])*q + d[3])*q + 1)
    if p > 1 - lo:
        return -_normal_quantile(1 - p)
    q = p - 0.5
    r = q * q
    return (((((a[0]*r + a[1])*r + a[2])*r + a[3])*r + a[4])*r + a[5])*q / \
        (((((b[0]*r + b[1])*r + b[2])*r + b[3])*r + b[4])*r + 1)


def chi2_quantile(df: int, p: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Inverse CDF of the chi-squared distribution with ``df`` degrees of freedom.

    Newton iterations on ``P(df/2, x/2) = p`` (or on the upper tail for p > 0.5) from a Wilson-Hilferty start,
    falling back to bisection whenever a step leaves the current bracket.
    """
    if df < 1 or int(df) != df:
        raise DomainError(f"degrees of freedom must be a positive integer, got {df}", df=df)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p}", p=p)
    k = df / 2.0
    log_norm = gammaln(k) + k * math.log(2.0)

    q = 1.0 - p

    def excess(x):
        # CDF(x) - p, using the upper tail when p is close to 1
        if p > 0.5:
            return q - float(gammaincc(k, x / 2.0))
        return float(gammainc(k, x / 2.0)) - p

    def pdf(x):
        return math.exp((k - 1.0) * math.log(x) - x / 2.0 - log_norm)

    lo, hi = 0.0, max(1.0, 2.0 * df)
    while excess(hi) < 0:
        lo, hi = hi, 2.0 * hi
    x = min(max(_wilson_hilferty(df, p), lo), hi)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = excess(x)
        if f > 0:
            hi = x
        else:
            lo = x
        if hi - lo <= tol * hi:
            break
        dens = pdf(x)
        step = x - f / dens if dens > 0 else lo - 1.0
        x_new = step if lo < step < hi else 0.5 * (lo + hi)
        if abs(x_new - x) <= tol * x:
            x = x_new
            break
        x = x_new
    return x
