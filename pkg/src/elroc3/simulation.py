"""Monte Carlo coverage experiments.

A replicate draws a fresh dataset, calibrates the method and checks whether
the true parameter is covered by evaluating the statistic at the truth and
comparing it with the cutoff. Because every confidence set here is a sublevel
set of its statistic, this is equivalent to membership without any grid
discretisation.

Replicate ``r`` of cell ``(scenario, sizes)`` is driven entirely by
``SeedSequence(master_seed, spawn_key=(scenario_id, size_index, r))``, so a
plan gives the same answer regardless of worker count or scheduling order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .bootstrap import estimate_w_pair, estimate_w_tcf2, estimate_w_vus, mc_quantile_mixture
from .chi2 import chi2_quantile
from .empirical import TcfTriple, ThresholdPair, empirical_quantile, vus_estimate, vus_estimate_ties
from .errors import (
    BoundaryEstimateError,
    DegenerateScaleError,
    InputError,
    OrderingInfeasibleError,
    ValidationError,
)
from .pivots import (
    domain_failures,
    ell_star2_pair,
    ell_star_tcf2,
    ell_tcf_triple,
    ell_vus,
    empirical_fractions,
    plugin_thresholds,
    tcf2_diagnostic,
)
from .scenarios import ScenarioSpec, builtin_scenarios, sample_scenario, scenario_truth

METHODS = ("region3d", "ci_tcf2", "ci_vus", "region2d")
BOOTSTRAP_METHODS = ("ci_tcf2", "ci_vus", "region2d")
WORKERS_ENV = "ELROC3_WORKERS"

# excluded from the denominator
EXCLUDED = ("ordering_infeasible", "degenerate_scale")
# kept in the denominator and scored as not covered
INCLUDED = ("empty_interval", "boundary_estimate", "domain_condition")
FAILURE_KEYS = EXCLUDED + INCLUDED


@dataclass(frozen=True)
class ExperimentPlan:
    """What to simulate.

    ``theta1``/``theta3`` default to each scenario's reference values;
    ``t2`` (region2d only) is either a number or ``"truth"`` for the
    scenario's true upper threshold.
    """

    method: str
    scenario_ids: tuple[int, ...]
    sizes: tuple[tuple[int, int, int], ...]
    levels: tuple[float, ...] = (0.90, 0.95, 0.99)
    R: int = 1000
    B: int = 200
    master_seed: int = 0
    theta1: float | None = None
    theta3: float | None = None
    t2: float | str | None = None
    ties: bool = False
    mc_draws: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "scenario_ids", tuple(int(s) for s in self.scenario_ids))
        object.__setattr__(self, "sizes", tuple(tuple(int(n) for n in s) for s in self.sizes))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        if self.method not in METHODS:
            raise ValidationError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.scenario_ids or not self.sizes or not self.levels:
            raise ValidationError("plan needs at least one scenario, size triple and level")
        if any(len(s) != 3 or min(s) < 1 for s in self.sizes):
            raise ValidationError(f"sizes must be triples of positive counts, got {self.sizes}")
        if any(not 0.0 < v < 1.0 for v in self.levels):
            raise ValidationError(f"levels must lie in (0, 1), got {self.levels}")
        if self.R < 100:
            raise ValidationError(f"R must be at least 100, got {self.R}", R=self.R)
        if self.method in BOOTSTRAP_METHODS and self.B < 50:
            raise ValidationError(f"B must be at least 50 for {self.method}, got {self.B}", B=self.B)
        if self.master_seed < 0:
            raise ValidationError("master_seed must be non-negative")
        for name in ("theta1", "theta3"):
            v = getattr(self, name)
            if v is not None and not 0.0 < v < 1.0:
                raise ValidationError(f"{name} must lie in (0, 1), got {v}")
        if self.method == "region2d":
            if self.t2 is None:
                raise ValidationError("region2d plans need t2 (a number or 'truth')")
            if isinstance(self.t2, str) and self.t2 != "truth":
                raise ValidationError(f"t2 must be a number or 'truth', got {self.t2!r}")
        elif self.t2 is not None:
            raise ValidationError(f"t2 only applies to region2d, not {self.method}")

    def to_dict(self) -> dict[str, Any]:
        d = dict(self.__dict__)
        d["scenario_ids"] = list(self.scenario_ids)
        d["sizes"] = [list(s) for s in self.sizes]
        d["levels"] = list(self.levels)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentPlan":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValidationError(f"unknown plan fields {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ValidationError(f"incomplete plan: {exc}") from exc


def load_plan(path: str | Path) -> ExperimentPlan:
    """Read an :class:`ExperimentPlan` from a JSON file."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read plan file: {exc}", path=str(path)) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"plan file is not valid JSON: {exc}", path=str(path)) from exc
    if not isinstance(raw, dict):
        raise InputError("plan file must hold a JSON object", path=str(path))
    return ExperimentPlan.from_dict(raw)


@dataclass(frozen=True)
class CoverageCell:
    """Coverage at one (scenario, sizes, level) combination."""

    method: str
    scenario_id: int
    sizes: tuple[int, int, int]
    level: float
    R: int
    effective: int
    covered: int
    failures: dict[str, int] = field(default_factory=dict)

    @property
    def coverage(self) -> float:
        return self.covered / self.effective if self.effective else float("nan")

    @property
    def se(self) -> float:
        if not self.effective:
            return float("nan")
        c = self.coverage
        return math.sqrt(c * (1.0 - c) / self.effective)

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "scenario_id": self.scenario_id,
            "sizes": list(self.sizes),
            "level": self.level,
            "R": self.R,
            "effective": self.effective,
            "covered": self.covered,
            "coverage": self.coverage,
            "se": self.se,
            "failures": {k: self.failures.get(k, 0) for k in FAILURE_KEYS},
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CoverageCell":
        return cls(
            d["method"], int(d["scenario_id"]), tuple(int(n) for n in d["sizes"]), float(d["level"]),
            int(d["R"]), int(d["effective"]), int(d["covered"]),
            {k: int(v) for k, v in d["failures"].items()},
        )


@dataclass(frozen=True)
class CoverageResult:
    """All cells of one plan, plus the targets that were tested for coverage."""

    plan: ExperimentPlan
    cells: tuple[CoverageCell, ...]
    targets: dict[int, dict[str, float]] = field(default_factory=dict)

    def cell(self, scenario_id: int, sizes: Sequence[int], level: float) -> CoverageCell:
        for c in self.cells:
            if c.scenario_id == scenario_id and c.sizes == tuple(sizes) and c.level == level:
                return c
        raise KeyError((scenario_id, tuple(sizes), level))

    def coverages(self, scenario_id: int, sizes: Sequence[int]) -> tuple[float, ...]:
        return tuple(self.cell(scenario_id, sizes, lv).coverage for lv in self.plan.levels)

    def to_dict(self) -> dict[str, Any]:
        return {
            "plan": self.plan.to_dict(),
            "targets": {str(k): v for k, v in self.targets.items()},
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CoverageResult":
        return cls(
            ExperimentPlan.from_dict(d["plan"]),
            tuple(CoverageCell.from_dict(c) for c in d["cells"]),
            {int(k): {kk: float(vv) for kk, vv in v.items()} for k, v in d["targets"].items()},
        )


# -- targets ----------------------------------------------------------------


def coverage_targets(spec: ScenarioSpec, plan: ExperimentPlan) -> dict[str, float]:
    """Exact true thresholds and parameters for ``plan`` under ``spec``.

    Computed from the scenario's distributions rather than copied from its
    rounded reference row.
    """
    d1, d2, d3 = (d.frozen() for d in spec.dists)
    th1 = spec.truth.theta10 if plan.theta1 is None else plan.theta1
    t1 = float(d1.ppf(th1))
    if plan.method == "region2d" and plan.t2 != "truth":
        t2 = float(plan.t2)
        th3 = float(d3.sf(t2))
    else:
        th3 = spec.truth.theta30 if plan.theta3 is None else plan.theta3
        t2 = float(d3.ppf(1.0 - th3))
    th2 = float(d2.cdf(t2) - d2.cdf(t1))
    out = {"t1": t1, "t2": t2, "theta1": th1, "theta2": th2, "theta3": th3}
    if plan.method == "ci_vus":
        out["gamma"] = scenario_truth(spec, method="quad").gamma0
    return out


# -- replicate kernels ------------------------------------------------------


def _replicate(plan: ExperimentPlan, spec: ScenarioSpec, size_index: int, r: int, target: dict, cutoffs: list[float]):
    """Return ``(list of covered flags per level, failure key or None)``."""
    ss = np.random.SeedSequence(plan.master_seed, spawn_key=(spec.id, size_index, r))
    data_ss, boot_ss = ss.spawn(2)
    bseed = int(boot_ss.generate_state(1, np.uint64)[0])
    x = sample_scenario(spec, *plan.sizes[size_index], seed=data_ss)
    m = plan.method
    nlev = len(plan.levels)
    try:
        if m == "region3d":
            t = ThresholdPair(target["t1"], target["t2"])
            v = ell_tcf_triple(x, t, TcfTriple(target["theta1"], target["theta2"], target["theta3"]))
            if not math.isfinite(v):
                return [False] * nlev, "domain_condition"
            return [v <= q for q in cutoffs], None
        if m == "ci_tcf2":
            th1, th3 = target["theta1"], target["theta3"]
            if tcf2_diagnostic(x, th1, th3) is not None:
                return [False] * nlev, "empty_interval"
            w = estimate_w_tcf2(x, th1, th3, plan.B, bseed).w_hat
            v = w * ell_star_tcf2(x, th1, target["theta2"], th3)
            vmin = w * ell_star_tcf2(x, th1, _p2_at_plugin(x, th1, th3), th3)
            flags = [v <= q for q in cutoffs]
            empty = any(vmin > q for q in cutoffs)
            return flags, ("empty_interval" if empty else None)
        if m == "ci_vus":
            g = vus_estimate_ties(x) if plan.ties else vus_estimate(x)
            if g <= 0.0 or g >= 1.0:
                return [False] * nlev, "boundary_estimate"
            w = estimate_w_vus(x, plan.B, bseed, plan.ties).w_hat
            v = w * ell_vus(g, x.n, target["gamma"])
            return [v <= q for q in cutoffs], None
        # region2d
        th1, t2 = target["theta1"], target["t2"]
        v = ell_star2_pair(x, th1, target["theta2"], target["theta3"], t2)
        if not math.isfinite(v) and _pair_domain_fails(x, th1, t2):
            return [False] * nlev, "domain_condition"
        w = estimate_w_pair(x, th1, t2, plan.B, bseed).w_hat
        cs = [mc_quantile_mixture(w, 1.0 - lv, plan.mc_draws, bseed) for lv in plan.levels]
        return [v <= c for c in cs], None
    except OrderingInfeasibleError:
        return None, "ordering_infeasible"
    except (DegenerateScaleError, BoundaryEstimateError):
        return None, "degenerate_scale"


def _p2_at_plugin(x, th1, th3) -> float:
    t1, t2 = plugin_thresholds(x, th1, th3)
    p2 = empirical_fractions(x, t1, t2)[1]
    return min(max(p2, 1e-12), 1 - 1e-12)


def _pair_domain_fails(x, th1, t2) -> bool:
    t1 = empirical_quantile(x.class1, th1)
    return t1 >= t2 or bool(domain_failures(x, t1, t2, check_class1=False))


def _cutoffs(plan: ExperimentPlan) -> list[float]:
    df = 3 if plan.method == "region3d" else 1
    return [chi2_quantile(df, lv) for lv in plan.levels]


def _run_chunk(args):
    plan, spec, size_index, rs, target = args
    cutoffs = _cutoffs(plan)
    return [_replicate(plan, spec, size_index, r, target, cutoffs) for r in rs]


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, workers)


def run_coverage(
    plan: ExperimentPlan,
    scenarios: Iterable[ScenarioSpec] | None = None,
    workers: int | None = None,
) -> CoverageResult:
    """Run every (scenario, sizes) cell of ``plan``.

    Parameters
    ----------
    plan : ExperimentPlan
    scenarios : iterable of ScenarioSpec, optional
        Where to look up ``plan.scenario_ids``; defaults to the built-ins.
    workers : int, optional
        Process count. Defaults to the ``ELROC3_WORKERS`` environment
        variable, else 1. Results do not depend on this value.
    """
    pool = {s.id: s for s in (builtin_scenarios() if scenarios is None else scenarios)}
    missing = [i for i in plan.scenario_ids if i not in pool]
    if missing:
        raise ValidationError(f"unknown scenario ids {missing}")
    nw = _worker_count(workers)
    targets = {sid: coverage_targets(pool[sid], plan) for sid in plan.scenario_ids}

    jobs = []
    for sid in plan.scenario_ids:
        for si in range(len(plan.sizes)):
            chunks = np.array_split(np.arange(plan.R), nw * 4 if nw > 1 else 1)
            for ch in chunks:
                if ch.size:
                    jobs.append(((sid, si), (plan, pool[sid], si, ch.tolist(), targets[sid])))
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            outs = list(ex.map(_run_chunk, [a for _, a in jobs]))
    else:
        outs = [_run_chunk(a) for _, a in jobs]

    collected: dict[tuple[int, int], list] = {}
    for (key, _), out in zip(jobs, outs):
        collected.setdefault(key, []).extend(out)

    cells = []
    for sid in plan.scenario_ids:
        for si, sizes in enumerate(plan.sizes):
            reps = collected[(sid, si)]
            failures = {k: 0 for k in FAILURE_KEYS}
            for _, f in reps:
                if f is not None:
                    failures[f] += 1
            kept = [flags for flags, _ in reps if flags is not None]
            for li, lv in enumerate(plan.levels):
                cells.append(
                    CoverageCell(
                        plan.method, sid, sizes, lv, plan.R, len(kept),
                        sum(bool(fl[li]) for fl in kept), dict(failures),
                    )
                )
    return CoverageResult(plan, tuple(cells), targets)


# -- rendering --------------------------------------------------------------

CSV_FIELDS = ("method", "scenario_id", "n1", "n2", "n3", "level", "R", "effective", "covered",
              "coverage", "se") + FAILURE_KEYS


def _cells(results: Sequence[CoverageResult]) -> list[CoverageCell]:
    if not results:
        raise ValidationError("nothing to render")
    return [c for res in results for c in res.cells]


def render_table(results: Sequence[CoverageResult], fmt: str = "text") -> str:
    """Render coverage results as ``text``, ``csv`` or ``json``.

    The text layout has one row per (scenario, sizes) and one coverage
    column per level, each followed by its standard error.
    """
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for c in _cells(results):
            w.writerow(
                [c.method, c.scenario_id, *c.sizes, repr(c.level), c.R, c.effective, c.covered,
                 repr(c.coverage), repr(c.se)] + [c.failures.get(k, 0) for k in FAILURE_KEYS]
            )
        return buf.getvalue()
    if fmt == "json":
        if not results:
            raise ValidationError("nothing to render")
        return json.dumps([r.to_dict() for r in results], indent=2)
    if fmt != "text":
        raise ValidationError(f"format must be text, csv or json, got {fmt!r}")
    lines = []
    for res in results:
        if not res.cells:
            continue
        levels = res.plan.levels
        head = f"{'scenario':>8}  {'sizes':<16}" + "".join(f"{lv:>16.2f}" for lv in levels) + "  failures"
        lines.append(f"method={res.plan.method} R={res.plan.R} B={res.plan.B} seed={res.plan.master_seed}")
        lines.append(head)
        for sid in res.plan.scenario_ids:
            for sizes in res.plan.sizes:
                row = [res.cell(sid, sizes, lv) for lv in levels]
                covs = "".join(f"{c.coverage:>9.3f} ({c.se:.3f})" for c in row)
                fails = ",".join(f"{k}={v}" for k, v in row[0].failures.items() if v)
                lines.append(f"{sid:>8}  {str(sizes):<16}{covs}  {fails or '-'}")
        lines.append("")
    if not lines:
        raise ValidationError("nothing to render")
    return "\n".join(lines)


def load_table_csv(text: str) -> list[CoverageCell]:
    """Parse the output of ``render_table(..., "csv")`` back into cells.

    Lines starting with ``#`` are ignored.
    """
    body = "".join(line for line in io.StringIO(text) if not line.startswith("#"))
    reader = csv.DictReader(io.StringIO(body))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise InputError(f"unexpected coverage CSV header {reader.fieldnames}")
    cells = []
    for row in reader:
        cells.append(
            CoverageCell(
                row["method"], int(row["scenario_id"]),
                (int(row["n1"]), int(row["n2"]), int(row["n3"])),
                float(row["level"]), int(row["R"]), int(row["effective"]), int(row["covered"]),
                {k: int(row[k]) for k in FAILURE_KEYS},
            )
        )
    return cells


def load_results_json(text: str) -> list[CoverageResult]:
    """Parse the output of ``render_table(..., "json")``."""
    return [CoverageResult.from_dict(d) for d in json.loads(text)]
