import json
import math

import pytest

from elroc3 import ValidationError
from elroc3.scenarios import DistSpec, ScenarioSpec, TruthRow, get_scenario
from elroc3.simulation import (
    CSV_FIELDS,
    CoverageCell,
    CoverageResult,
    ExperimentPlan,
    coverage_targets,
    load_plan,
    load_results_json,
    load_table_csv,
    render_table,
    run_coverage,
)


@pytest.fixture(scope="module")
def small_region3d():
    plan = ExperimentPlan("region3d", (1,), ((30, 30, 30),), R=100, master_seed=7)
    return run_coverage(plan, workers=1)


@pytest.fixture(scope="module")
def small_vus():
    plan = ExperimentPlan("ci_vus", (2,), ((30, 30, 30),), R=100, B=50, master_seed=7)
    return run_coverage(plan, workers=1)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(method="region2d"),
        dict(method="region3d", R=99),
        dict(method="ci_vus", B=10),
        dict(method="ci_tcf2", t2=4.0),
        dict(method="bogus"),
        dict(method="region3d", levels=(0.95, 1.0)),
        dict(method="region3d", sizes=((30, 0, 30),)),
        dict(method="region2d", t2="median"),
    ],
)
def test_plan_validation(kwargs):
    base = dict(scenario_ids=(1,), sizes=((30, 30, 30),))
    base.update(kwargs)
    with pytest.raises(ValidationError):
        ExperimentPlan(**base)


def test_plan_round_trip(tmp_path):
    plan = ExperimentPlan("region2d", (2, 5), ((50, 50, 50), (100, 100, 100)), t2="truth", R=200)
    assert ExperimentPlan.from_dict(json.loads(json.dumps(plan.to_dict()))) == plan
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(plan.to_dict()))
    assert load_plan(path) == plan
    with pytest.raises(ValidationError):
        ExperimentPlan.from_dict({**plan.to_dict(), "color": "red"})


def test_targets_are_exact_truth():
    plan = ExperimentPlan("region2d", (2,), ((50, 50, 50),), t2="truth")
    tg = coverage_targets(get_scenario(2), plan)
    assert tg["theta2"] == pytest.approx(0.8081, abs=1e-4)
    assert tg["t2"] == pytest.approx(4.4901, abs=1e-4)


def test_region3d_smoke(small_region3d):
    res = small_region3d
    assert len(res.cells) == 3
    for cell in res.cells:
        assert cell.effective + cell.failures["ordering_infeasible"] + cell.failures["degenerate_scale"] == 100
        assert cell.se == pytest.approx(math.sqrt(cell.coverage * (1 - cell.coverage) / cell.effective))
        # R = 100 gives SE near 0.02-0.03; four SE is generous for a smoke run
        assert abs(cell.coverage - cell.level) < 4 * max(cell.se, 0.01) + 0.02
    covs = res.coverages(1, (30, 30, 30))
    assert covs[0] <= covs[1] <= covs[2]


def test_vus_smoke(small_vus):
    covs = small_vus.coverages(2, (30, 30, 30))
    assert covs[0] <= covs[1] <= covs[2]
    assert 0.8 <= covs[1] <= 1.0


def test_deterministic(small_region3d):
    again = run_coverage(small_region3d.plan, workers=1)
    assert again == small_region3d


def test_worker_count_does_not_matter(small_vus):
    assert run_coverage(small_vus.plan, workers=2) == small_vus


def test_custom_scenario():
    spec = ScenarioSpec(
        42, DistSpec("normal", (0, 1)), DistSpec("normal", (2, 1)), DistSpec("normal", (4, 1)),
        TruthRow(0.842, 3.158, 0.8, 0.6, 0.8, 0.8), "custom",
    )
    plan = ExperimentPlan("region3d", (42,), ((20, 20, 20),), levels=(0.95,), R=100, master_seed=1)
    res = run_coverage(plan, scenarios=[spec])
    assert res.cells[0].scenario_id == 42
    with pytest.raises(ValidationError):
        run_coverage(ExperimentPlan("region3d", (43,), ((20, 20, 20),), R=100), scenarios=[spec])


def test_csv_round_trip(small_region3d, small_vus):
    text = render_table([small_region3d, small_vus], "csv")
    assert text.splitlines()[0].split(",") == list(CSV_FIELDS)
    cells = load_table_csv("# comment\n" + text)
    assert cells == list(small_region3d.cells + small_vus.cells)


def test_json_round_trip(small_vus):
    back = load_results_json(render_table([small_vus], "json"))
    assert back == [small_vus]
    assert CoverageResult.from_dict(small_vus.to_dict()) == small_vus
    assert CoverageCell.from_dict(small_vus.cells[0].to_dict()) == small_vus.cells[0]


def test_text_table_shape(small_region3d):
    lines = render_table([small_region3d], "text").splitlines()
    assert lines[0].startswith("method=region3d R=100")
    assert "0.90" in lines[1] and "0.99" in lines[1]
    assert len([ln for ln in lines if ln.strip()]) == 3


def test_render_rejects_unknown_format(small_vus):
    with pytest.raises(ValidationError):
        render_table([small_vus], "xml")
