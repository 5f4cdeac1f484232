"""Empirical-likelihood intervals and regions for three-class ROC analysis."""

__version__ = "0.1.0"

from .bootstrap import (
    MEDIAN_CHI2_1,
    ScaleEstimate,
    estimate_w_pair,
    estimate_w_tcf2,
    estimate_w_vus,
    mc_quantile_mixture,
    resample_ordered,
)
from .chi2 import chi2_quantile
from .empirical import (
    ClassSample,
    TcfTriple,
    ThreeClassSample,
    ThresholdPair,
    ecdf_eval,
    ecdf_eval_smoothed,
    empirical_quantile,
    empirical_quantile_smoothed,
    hum_estimate,
    p_hat,
    vus_estimate,
    vus_estimate_ties,
)
from .errors import (
    BoundaryEstimateError,
    ConventionMismatchError,
    DegenerateScaleError,
    DomainConditionError,
    DomainError,
    ElrocError,
    InputError,
    OrderingInfeasibleError,
    ValidationError,
)
from .io import load_dataset, parse_dataset
from .pivots import (
    binomial_deviance,
    ell_plus_symmetric,
    ell_star2_pair,
    ell_star_tcf2,
    ell_tcf_triple,
    ell_vus,
)
from .regions import (
    ConfidenceInterval,
    Region2D,
    Region3D,
    interval_tcf2,
    interval_vus,
    region2d_pair,
    region3d_tcf,
)
from .scenarios import DistSpec, ScenarioSpec, TruthRow, builtin_scenarios, sample_scenario, scenario_truth
from .simulation import CoverageResult, ExperimentPlan, render_table, run_coverage

__all__ = [
    "__version__",
    "chi2_quantile",
    "MEDIAN_CHI2_1",
    "ScaleEstimate",
    "estimate_w_pair",
    "estimate_w_tcf2",
    "estimate_w_vus",
    "mc_quantile_mixture",
    "resample_ordered",
    "ClassSample",
    "TcfTriple",
    "ThreeClassSample",
    "ThresholdPair",
    "ecdf_eval",
    "ecdf_eval_smoothed",
    "empirical_quantile",
    "empirical_quantile_smoothed",
    "hum_estimate",
    "p_hat",
    "vus_estimate",
    "vus_estimate_ties",
    "BoundaryEstimateError",
    "ConventionMismatchError",
    "DegenerateScaleError",
    "DomainConditionError",
    "DomainError",
    "ElrocError",
    "InputError",
    "OrderingInfeasibleError",
    "ValidationError",
    "load_dataset",
    "parse_dataset",
    "binomial_deviance",
    "ell_plus_symmetric",
    "ell_star2_pair",
    "ell_star_tcf2",
    "ell_tcf_triple",
    "ell_vus",
    "ConfidenceInterval",
    "Region2D",
    "Region3D",
    "interval_tcf2",
    "interval_vus",
    "region2d_pair",
    "region3d_tcf",
    "DistSpec",
    "ScenarioSpec",
    "TruthRow",
    "builtin_scenarios",
    "sample_scenario",
    "scenario_truth",
    "CoverageResult",
    "ExperimentPlan",
    "render_table",
    "run_coverage",
]
