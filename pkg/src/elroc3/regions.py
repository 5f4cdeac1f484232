"""Confidence intervals and regions built from the EL statistics.

* :func:`region3d_tcf` - region for a TCF triple at fixed thresholds,
  calibrated by chi-squared(3).
* :func:`interval_tcf2` - interval for TCF2 given TCF1 and TCF3, calibrated
  by a bootstrap-scaled chi-squared(1).
* :func:`interval_vus` - interval for the VUS, same calibration.
* :func:`region2d_pair` - region for (TCF2, TCF3) given TCF1 and t2,
  calibrated by the ``w U1 + U2`` mixture.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from .bootstrap import ScaleEstimate, estimate_w_pair, estimate_w_tcf2, estimate_w_vus, mc_quantile_mixture
from .chi2 import chi2_quantile
from .empirical import (
    TcfTriple,
    ThreeClassSample,
    ThresholdPair,
    empirical_quantile,
    vus_estimate,
    vus_estimate_ties,
)
from .errors import BoundaryEstimateError, DomainConditionError, DomainError
from .pivots import (
    binomial_deviance,
    domain_failures,
    ell_star2_pair,
    ell_star_tcf2,
    ell_vus,
    empirical_fractions,
    plugin_thresholds,
    tcf2_diagnostic,
)

EDGE_EPS = 1e-9
ROOT_XTOL = 1e-10


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}", alpha=alpha)


def interior_grid(grid_n: int) -> NDArray:
    """Points i / (grid_n + 1), i = 1..grid_n."""
    return np.arange(1, grid_n + 1) / (grid_n + 1)


@dataclass(frozen=True)
class ConfidenceInterval:
    """A solved interval together with the calibration that produced it.

    ``empty`` flags the case where even the point estimate exceeds the
    cutoff; ``lower`` and ``upper`` are then NaN and ``diagnostic`` says why.
    """

    lower: float
    upper: float
    level: float
    method_tag: str
    w_hat: float
    point_estimate: float
    cutoff: float
    empty: bool = False
    diagnostic: str | None = None
    scale: ScaleEstimate | None = None
    params: dict[str, Any] = field(default_factory=dict)

    def contains(self, value: float) -> bool:
        return (not self.empty) and self.lower <= value <= self.upper

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scale"] = None if self.scale is None else self.scale.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ConfidenceInterval":
        d = dict(d)
        if d.get("scale") is not None:
            d["scale"] = ScaleEstimate.from_dict(d["scale"])
        return cls(**d)


@dataclass(frozen=True)
class Region3D:
    """Grid membership for the TCF-triple region at fixed thresholds.

    ``membership[i, j, k]`` refers to ``(grid[i], grid[j], grid[k])`` for
    (theta1, theta2, theta3).
    """

    grid: NDArray
    membership: NDArray
    threshold_used: float
    thresholds: ThresholdPair
    point_estimate: TcfTriple
    level: float

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "membership": {"shape": list(self.membership.shape),
                           "flat": self.membership.ravel().astype(int).tolist()},
            "threshold_used": self.threshold_used,
            "thresholds": {"t1": self.thresholds.t1, "t2": self.thresholds.t2},
            "point_estimate": asdict(self.point_estimate),
            "level": self.level,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Region3D":
        m = d["membership"]
        return cls(
            grid=np.asarray(d["grid"], dtype=float),
            membership=np.asarray(m["flat"], dtype=bool).reshape(m["shape"]),
            threshold_used=d["threshold_used"],
            thresholds=ThresholdPair(**d["thresholds"]),
            point_estimate=TcfTriple(**d["point_estimate"]),
            level=d["level"],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Region3D):
            return NotImplemented
        return (
            np.array_equal(self.grid, other.grid)
            and np.array_equal(self.membership, other.membership)
            and self.threshold_used == other.threshold_used
            and self.thresholds == other.thresholds
            and self.point_estimate == other.point_estimate
            and self.level == other.level
        )


@dataclass(frozen=True)
class Region2D:
    """Grid membership for the (TCF2, TCF3) region; ``membership[i, j]`` is at
    ``(grid[i], grid[j])``."""

    grid: NDArray
    membership: NDArray
    c_alpha_hat: float
    w_hat: float
    theta1_fixed: float
    t2_fixed: float
    point_estimate: tuple[float, float]
    level: float
    scale: ScaleEstimate | None = None

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "membership": {"shape": list(self.membership.shape),
                           "flat": self.membership.ravel().astype(int).tolist()},
            "c_alpha_hat": self.c_alpha_hat,
            "w_hat": self.w_hat,
            "theta1_fixed": self.theta1_fixed,
            "t2_fixed": self.t2_fixed,
            "point_estimate": list(self.point_estimate),
            "level": self.level,
            "scale": None if self.scale is None else self.scale.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Region2D":
        m = d["membership"]
        return cls(
            grid=np.asarray(d["grid"], dtype=float),
            membership=np.asarray(m["flat"], dtype=bool).reshape(m["shape"]),
            c_alpha_hat=d["c_alpha_hat"],
            w_hat=d["w_hat"],
            theta1_fixed=d["theta1_fixed"],
            t2_fixed=d["t2_fixed"],
            point_estimate=tuple(d["point_estimate"]),
            level=d["level"],
            scale=None if d.get("scale") is None else ScaleEstimate.from_dict(d["scale"]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Region2D):
            return NotImplemented
        return (
            np.array_equal(self.grid, other.grid)
            and np.array_equal(self.membership, other.membership)
            and self.to_dict() == other.to_dict()
        )


def region3d_tcf(x: ThreeClassSample, t: ThresholdPair, alpha: float = 0.05, grid_n: int = 99) -> Region3D:
    """Confidence region for (TCF1, TCF2, TCF3) at the thresholds ``t``.

    The statistic is a sum of one deviance per axis, so the lattice is
    filled by broadcasting three 1-D deviance vectors.
    """
    _check_alpha(alpha)
    if grid_n < 11:
        raise DomainError(f"grid_n must be at least 11, got {grid_n}", grid_n=grid_n)
    bad = domain_failures(x, t.t1, t.t2)
    if bad:
        raise DomainConditionError("; ".join(bad), t1=t.t1, t2=t.t2)
    f1, p2, f3 = empirical_fractions(x, t.t1, t.t2)
    if p2 <= 0.0:
        raise DomainConditionError("no class-2 observation in (t1, t2]", t1=t.t1, t2=t.t2)
    n1, n2, n3 = x.sizes
    g = interior_grid(grid_n)
    d1 = binomial_deviance(n1, f1, g)
    d2 = binomial_deviance(n2, p2, g)
    d3 = binomial_deviance(n3, f3, 1.0 - g)
    q = chi2_quantile(3, 1.0 - alpha)
    mask = (d1[:, None, None] + d2[None, :, None] + d3[None, None, :]) <= q
    return Region3D(
        grid=g,
        membership=mask,
        threshold_used=q,
        thresholds=t,
        point_estimate=TcfTriple(f1, p2, 1.0 - f3),
        level=1.0 - alpha,
    )


def _solve_sides(f, center: float, lo_edge: float, hi_edge: float) -> tuple[float, float]:
    """Roots of the convex, centre-minimised ``f`` on either side of ``center``."""
    if center <= lo_edge:
        lower = center
    elif f(lo_edge) <= 0:
        lower = lo_edge
    else:
        lower = brentq(f, lo_edge, center, xtol=ROOT_XTOL)
    if center >= hi_edge:
        upper = center
    elif f(hi_edge) <= 0:
        upper = hi_edge
    else:
        upper = brentq(f, center, hi_edge, xtol=ROOT_XTOL)
    return lower, upper


def _resolve_scale(scale, estimator) -> tuple[float, ScaleEstimate | None]:
    if scale is None:
        est = estimator()
        return est.w_hat, est
    if isinstance(scale, ScaleEstimate):
        return scale.w_hat, scale
    return float(scale), None


def interval_tcf2(
    x: ThreeClassSample,
    theta1: float,
    theta3: float,
    alpha: float = 0.05,
    B: int = 200,
    seed: int = 0,
    scale: ScaleEstimate | float | None = None,
) -> ConfidenceInterval:
    """Interval for TCF2 with TCF1 = ``theta1`` and TCF3 = ``theta3`` held fixed.

    ``{theta2 : w * ell_star(theta2) <= chi2_{1, 1-alpha}}``. The scale ``w``
    is estimated by the bootstrap unless ``scale`` is supplied.
    """
    _check_alpha(alpha)
    q = chi2_quantile(1, 1.0 - alpha)
    params = {"theta1": theta1, "theta3": theta3, "B": B, "seed": seed}
    t1, t2 = plugin_thresholds(x, theta1, theta3)
    reason = tcf2_diagnostic(x, theta1, theta3)
    if reason is not None:
        # the statistic is infinite everywhere, so there is nothing to calibrate
        point = float("nan") if t1 >= t2 else empirical_fractions(x, t1, t2)[1]
        w = scale.w_hat if isinstance(scale, ScaleEstimate) else (float("nan") if scale is None else float(scale))
        return ConfidenceInterval(
            float("nan"), float("nan"), 1.0 - alpha, "ELQB-TCF2", w, point, q,
            empty=True, diagnostic=reason, scale=scale if isinstance(scale, ScaleEstimate) else None,
            params=params,
        )
    w, est = _resolve_scale(scale, lambda: estimate_w_tcf2(x, theta1, theta3, B, seed))
    point = empirical_fractions(x, t1, t2)[1]

    def f(th):
        return w * ell_star_tcf2(x, theta1, th, theta3) - q

    if f(point) > 0:
        return ConfidenceInterval(
            float("nan"), float("nan"), 1.0 - alpha, "ELQB-TCF2", w, point, q,
            empty=True, diagnostic="fixed_tcfs_incompatible", scale=est, params=params,
        )
    lower, upper = _solve_sides(f, point, EDGE_EPS, 1.0 - EDGE_EPS)
    return ConfidenceInterval(lower, upper, 1.0 - alpha, "ELQB-TCF2", w, point, q, scale=est, params=params)


def interval_vus(
    x: ThreeClassSample,
    alpha: float = 0.05,
    B: int = 200,
    seed: int = 0,
    ties: bool = False,
    scale: ScaleEstimate | float | None = None,
) -> ConfidenceInterval:
    """Interval for the volume under the ROC surface.

    ``{gamma : w * ell(gamma) <= chi2_{1, 1-alpha}}`` with ``w`` from the
    bootstrap unless ``scale`` is supplied.
    """
    _check_alpha(alpha)
    gamma_hat = vus_estimate_ties(x) if ties else vus_estimate(x)
    if gamma_hat <= 0.0 or gamma_hat >= 1.0:
        raise BoundaryEstimateError(
            "VUS estimate is on the boundary; try the ties estimator or more data",
            gamma_hat=gamma_hat,
        )
    w, est = _resolve_scale(scale, lambda: estimate_w_vus(x, B, seed, ties))
    q = chi2_quantile(1, 1.0 - alpha)
    n = x.n

    def f(g):
        return w * ell_vus(gamma_hat, n, g) - q

    lower, upper = _solve_sides(f, gamma_hat, EDGE_EPS, 1.0 - EDGE_EPS)
    return ConfidenceInterval(
        lower, upper, 1.0 - alpha, "ELQB-VUS", w, gamma_hat, q,
        scale=est, params={"B": B, "seed": seed, "ties": ties},
    )


def region2d_pair(
    x: ThreeClassSample,
    theta1: float,
    t2: float,
    alpha: float = 0.05,
    B: int = 200,
    grid_n: int = 199,
    seed: int = 0,
    scale: ScaleEstimate | float | None = None,
    mc_draws: int = 1000,
) -> Region2D:
    """Confidence region for (TCF2, TCF3) with TCF1 = ``theta1`` and threshold ``t2``.

    The cutoff is the Monte Carlo (1 - alpha) quantile of ``w U1 + U2``.
    """
    _check_alpha(alpha)
    if grid_n < 11:
        raise DomainError(f"grid_n must be at least 11, got {grid_n}", grid_n=grid_n)
    t1 = empirical_quantile(x.class1, theta1)
    if t1 >= t2:
        raise DomainConditionError("estimated t1 is not below t2", t1=t1, t2=t2)
    bad = domain_failures(x, t1, t2, check_class1=False)
    if bad:
        raise DomainConditionError("; ".join(bad), t1=t1, t2=t2)
    w, est = _resolve_scale(scale, lambda: estimate_w_pair(x, theta1, t2, B, seed))
    c = mc_quantile_mixture(w, alpha, mc_draws, seed)
    g = interior_grid(grid_n)
    values = ell_star2_pair(x, theta1, g[:, None], g[None, :], t2)
    _, p2, f3 = empirical_fractions(x, t1, t2)
    return Region2D(
        grid=g,
        membership=values <= c,
        c_alpha_hat=c,
        w_hat=w,
        theta1_fixed=theta1,
        t2_fixed=float(t2),
        point_estimate=(p2, 1.0 - f3),
        level=1.0 - alpha,
        scale=est,
    )
