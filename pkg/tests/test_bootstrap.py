import numpy as np
import pytest
from scipy import stats

import elroc3.bootstrap as bs
from elroc3 import (
    MEDIAN_CHI2_1,
    DegenerateScaleError,
    DomainError,
    OrderingInfeasibleError,
    ThreeClassSample,
    estimate_w_pair,
    estimate_w_tcf2,
    estimate_w_vus,
    mc_quantile_mixture,
    resample_ordered,
)
from elroc3.scenarios import get_scenario, sample_scenario


def identity_resampler(x, rng):
    return x, 0


class TestResampleOrdered:
    def test_separated_classes_accept_first_draw(self, rng):
        x = ThreeClassSample.from_arrays([0, 0], [10, 10], [20, 20])
        xb, rejected = resample_ordered(x, rng)
        assert rejected == 0
        assert xb == x

    def test_identical_classes_are_infeasible(self, rng):
        x = ThreeClassSample.from_arrays([1], [1], [1])
        with pytest.raises(OrderingInfeasibleError):
            resample_ordered(x, rng)

    def test_overlapping_mixture_is_feasible(self):
        x = sample_scenario(get_scenario(10), 30, 30, 30, seed=8)
        accepted = 0
        for b in range(1000):
            try:
                resample_ordered(x, bs.replicate_rng(8, b), max_rejections=1)
                accepted += 1
            except OrderingInfeasibleError:
                pass
        assert accepted >= 1

    def test_pair_only_resamples_two_classes(self, scen2_50, rng):
        xb, _ = resample_ordered(scen2_50, rng, classes=(1, 2))
        assert xb.class3 == scen2_50.class3
        assert xb.class1.mean < xb.class2.mean

    def test_affine_map_keeps_rejection_counts(self, scen1_30):
        y = ThreeClassSample.from_arrays(*(3.0 * c.values - 7.0 for c in scen1_30.classes))
        for b in range(20):
            _, r1 = resample_ordered(scen1_30, bs.replicate_rng(4, b))
            _, r2 = resample_ordered(y, bs.replicate_rng(4, b))
            assert r1 == r2


class TestScaleFormula:
    @pytest.mark.parametrize(
        "name, args, values, expected",
        [
            ("bootstrap_pivots_tcf2", (0.8, 0.8), [0.2, 0.4, 0.8], MEDIAN_CHI2_1 / 0.4),
            ("bootstrap_pivots_vus", (), [0.1, 0.3, 0.9], MEDIAN_CHI2_1 / 0.3),
            ("bootstrap_pivots_pair", (0.8, 4.5), [0.2, 0.4, 0.8], 0.4 / MEDIAN_CHI2_1),
        ],
    )
    def test_stubbed_values(self, monkeypatch, scen2_50, name, args, values, expected):
        monkeypatch.setattr(bs, name, lambda *a, **k: (np.array(values), 0))
        est_fn = {"bootstrap_pivots_tcf2": estimate_w_tcf2, "bootstrap_pivots_vus": estimate_w_vus,
                  "bootstrap_pivots_pair": estimate_w_pair}[name]
        est = est_fn(scen2_50, *args, B=3, seed=0)
        assert est.w_hat == pytest.approx(expected, rel=1e-15)
        assert est.median_value == values[1]

    def test_example_numbers(self):
        assert bs.scale_from_median([0.2, 0.4, 0.8])[0] == pytest.approx(1.1763, abs=5e-5)
        assert bs.scale_from_median([0.1, 0.3, 0.9])[0] == pytest.approx(1.5684, abs=5e-5)
        assert bs.scale_from_median([0.2, 0.4, 0.8], inverted=True)[0] == pytest.approx(0.8501, abs=5e-5)

    @pytest.mark.parametrize("inverted", [False, True])
    def test_median_at_reference_gives_one(self, inverted):
        assert bs.scale_from_median([MEDIAN_CHI2_1] * 5, inverted)[0] == pytest.approx(1.0, rel=1e-15)

    def test_even_median_and_infinities(self):
        assert bs.scale_from_median([1.0, 2.0, np.inf, np.inf, 0.5, 3.0])[1] == 2.5
        with pytest.raises(DegenerateScaleError):
            bs.scale_from_median([1.0, np.inf, np.inf])

    @pytest.mark.parametrize("which", ["tcf2", "vus", "pair"])
    def test_identity_resampler_is_degenerate(self, atoms_sample, which):
        with pytest.raises(DegenerateScaleError):
            if which == "tcf2":
                estimate_w_tcf2(atoms_sample, 0.8, 0.8, B=5, seed=0, resampler=identity_resampler)
            elif which == "vus":
                estimate_w_vus(atoms_sample, B=5, seed=0, resampler=identity_resampler)
            else:
                estimate_w_pair(atoms_sample, 0.8, 5.0, B=5, seed=0, resampler=identity_resampler)


class TestEstimates:
    def test_deterministic(self, scen1_30):
        a = estimate_w_tcf2(scen1_30, 0.8, 0.8, B=100, seed=42)
        b = estimate_w_tcf2(scen1_30, 0.8, 0.8, B=100, seed=42)
        assert a == b
        assert a.B_accepted == a.B_requested == 100
        assert a != estimate_w_tcf2(scen1_30, 0.8, 0.8, B=100, seed=43)

    def test_builtin_resampler_matches_public_one(self, scen1_30):
        """The vectorised path draws exactly what resample_ordered would."""
        a = estimate_w_vus(scen1_30, B=30, seed=5)
        b = estimate_w_vus(scen1_30, B=30, seed=5, resampler=resample_ordered)
        assert a == b

    def test_identical_classes(self):
        x = ThreeClassSample.from_arrays([1, 1], [1, 1], [1, 1])
        with pytest.raises(OrderingInfeasibleError):
            estimate_w_vus(x, B=10, seed=0, ties=True)

    def test_crossed_thresholds_are_degenerate(self):
        x = ThreeClassSample.from_arrays(np.arange(10.0), np.arange(10.0) + 0.5, np.arange(10.0) + 1)
        with pytest.raises(DegenerateScaleError):
            estimate_w_tcf2(x, 0.9, 0.9, B=10, seed=0)

    def test_positive_finite(self, scen1_30, scen2_50):
        for est in (
            estimate_w_tcf2(scen1_30, 0.8, 0.8, B=50, seed=1),
            estimate_w_vus(scen1_30, B=50, seed=1),
            estimate_w_vus(scen1_30, B=50, seed=1, ties=True),
            estimate_w_pair(scen2_50, 0.8, 4.49, B=50, seed=1),
        ):
            assert 0 < est.w_hat < np.inf

    def test_round_trip(self, scen1_30):
        est = estimate_w_vus(scen1_30, B=20, seed=3)
        assert bs.ScaleEstimate.from_dict(est.to_dict()) == est

    def test_B_validation(self, scen1_30):
        with pytest.raises(DomainError):
            estimate_w_vus(scen1_30, B=1, seed=0)


class TestMixtureQuantile:
    def test_w_zero_is_chi2_1(self):
        assert mc_quantile_mixture(0.0, 0.05, 1000, seed=0) == pytest.approx(3.841, abs=0.25)

    def test_w_one_is_chi2_2(self):
        assert mc_quantile_mixture(1.0, 0.05, 1000, seed=0) == pytest.approx(5.991, abs=0.5)

    @pytest.mark.slow
    def test_converges(self):
        assert mc_quantile_mixture(1.0, 0.05, 10**6, seed=0) == pytest.approx(stats.chi2.ppf(0.95, 2), abs=0.02)

    def test_monotone_in_w(self):
        cs = [mc_quantile_mixture(w, 0.1, 1000, seed=11) for w in np.linspace(0, 3, 13)]
        assert np.all(np.diff(cs) >= 0)

    @pytest.mark.parametrize("w, alpha, M", [(-1.0, 0.05, 1000), (np.inf, 0.05, 1000), (1.0, 0.05, 10)])
    def test_validation(self, w, alpha, M):
        with pytest.raises(DomainError):
            mc_quantile_mixture(w, alpha, M)
