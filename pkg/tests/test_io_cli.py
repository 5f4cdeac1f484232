import json
import subprocess
import sys

import numpy as np
import pytest

from elroc3 import InputError, ThresholdPair, interval_vus, region2d_pair, region3d_tcf
from elroc3.cli import EXIT_CODES, main
from elroc3.io import (
    load_dataset,
    parse_dataset,
    region_from_csv,
    region_to_csv,
    result_from_json,
    result_to_json,
    write_dataset,
)

TINY = "class,value\n1,0.1\n2,0.5\n3,0.9\n"


class TestDatasets:
    def test_three_rows(self):
        x = parse_dataset(TINY)
        assert x.sizes == (1, 1, 1)
        assert x.class2.values.tolist() == [0.5]

    def test_header_optional_and_blank_lines(self):
        x = parse_dataset("1,0\n\n2, 1\n3 ,2\n")
        assert x.sizes == (1, 1, 1)

    def test_missing_class(self):
        with pytest.raises(InputError, match="class 3"):
            parse_dataset("class,value\n1,0\n2,1\n")

    @pytest.mark.parametrize(
        "text, line",
        [("class,value\n1,0\n4,1\n3,2\n", 3), ("1,0\n2,abc\n3,2\n", 2), ("1,0\n2,1,5\n3,2\n", 2), ("1,0\n2,nan\n3,1\n", 2)],
    )
    def test_errors_carry_line(self, text, line):
        with pytest.raises(InputError) as exc:
            parse_dataset(text, "f.csv")
        assert exc.value.context["line"] == line
        assert f"f.csv:{line}:" in str(exc.value)

    def test_synthetic_file(self, synthetic_csv):
        x = load_dataset(synthetic_csv)
        assert x.sizes == (34, 75, 142)
        assert x.means_ordered()

    def test_write_round_trip(self, tmp_path, scen1_30):
        p = tmp_path / "d.csv"
        write_dataset(scen1_30, p)
        back = load_dataset(p)
        assert all(np.array_equal(a.values, b.values) for a, b in zip(back.classes, scen1_30.classes))

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_dataset(tmp_path / "nope.csv")


class TestResultFiles:
    def test_region3d_csv_round_trip(self, scen1_30):
        r = region3d_tcf(scen1_30, ThresholdPair(0.84, 2.68), grid_n=13)
        back, cfg = region_from_csv(region_to_csv(r, {"seed": 1}))
        assert back == r and cfg == {"seed": 1}

    def test_region2d_csv_and_json_round_trip(self, scen2_50):
        r = region2d_pair(scen2_50, 0.8, 4.49, scale=1.2, grid_n=15)
        assert region_from_csv(region_to_csv(r))[0] == r
        assert result_from_json(result_to_json(r))[0] == r

    def test_interval_json_round_trip(self, scen1_30):
        ci = interval_vus(scen1_30, B=50, seed=3)
        back, cfg = result_from_json(result_to_json(ci, {"a": 1}))
        assert back == ci and cfg == {"a": 1}

    def test_bad_documents(self):
        with pytest.raises(InputError):
            result_from_json('{"kind": "pie"}')
        with pytest.raises(InputError):
            region_from_csv("theta2,theta3,member\n")


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestCli:
    def test_ci_vus_json(self, synthetic_csv, capsys):
        code, out, _ = run(["ci-vus", synthetic_csv, "--seed", 1, "--B", 100], capsys)
        assert code == 0
        doc = json.loads(out)
        res = doc["result"]
        assert res["lower"] <= res["point_estimate"] <= res["upper"]
        assert res["point_estimate"] == pytest.approx(0.740, abs=5e-4)
        assert doc["config"]["seed"] == 1 and doc["config"]["data"]["sizes"] == [34, 75, 142]

    def test_ci_tcf2_text(self, synthetic_csv, capsys):
        code, out, _ = run(["ci-tcf2", synthetic_csv, "--theta1", 0.8, "--theta3", 0.8, "--seed", 2,
                            "--B", 100, "--format", "text"], capsys)
        assert code == 0
        assert out.startswith("# config: ")
        assert "estimate" in out and "interval    [" in out

    def test_byte_identical_reruns(self, synthetic_csv, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            p = tmp_path / name
            assert main(["ci-tcf2", str(synthetic_csv), "--theta1", "0.8", "--theta3", "0.8", "--seed", "5",
                         "--B", "60", "-o", str(p)]) == 0
            outs.append(p.read_bytes())
        assert outs[0] == outs[1]

    def test_bad_alpha_is_validation(self, synthetic_csv, capsys):
        code, _, err = run(["ci-vus", synthetic_csv, "--seed", 1, "--alpha", 1.5], capsys)
        assert code == EXIT_CODES["validation"] == 2
        assert json.loads(err)["error"]["category"] == "validation"

    def test_seed_required(self, synthetic_csv, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["ci-vus", str(synthetic_csv)])
        assert exc.value.code == 2
        assert json.loads(capsys.readouterr().err)["error"]["category"] == "validation"

    def test_seed_auto_is_reported(self, synthetic_csv, capsys):
        code, out, err = run(["ci-vus", synthetic_csv, "--seed", "auto", "--B", 50], capsys)
        assert code == 0
        seed = int(err.strip().split("seed: ")[1])
        assert json.loads(out)["config"]["seed"] == seed

    def test_region3d_csv(self, synthetic_csv, capsys):
        code, out, _ = run(["region3d", synthetic_csv, "--t1", 0.275, "--t2", 1.35, "--grid-n", 11], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("# ") and lines[1] == "theta1,theta2,theta3,member"
        assert len(lines) == 2 + 11**3
        region, cfg = region_from_csv(out)
        assert cfg["t1"] == 0.275 and region.membership.any()

    def test_region2d_json(self, synthetic_csv, capsys):
        code, out, _ = run(["region2d", synthetic_csv, "--theta1", 0.9, "--t2", 1.27, "--seed", 1, "--B", 60,
                            "--grid-n", 21, "--format", "json"], capsys)
        assert code == 0
        region, _ = result_from_json(out)
        assert region.membership.shape == (21, 21)

    def test_missing_input(self, tmp_path, capsys):
        code, _, err = run(["vus", tmp_path / "none.csv"], capsys)
        assert code == EXIT_CODES["input"]
        assert json.loads(err)["error"]["category"] == "input"

    def test_domain_condition_exit(self, synthetic_csv, capsys):
        code, _, err = run(["region3d", synthetic_csv, "--t1", -50, "--t2", 1.35], capsys)
        assert code == EXIT_CODES["domain_condition"]

    def test_empty_interval_exit(self, tmp_path, capsys):
        p = tmp_path / "crossed.csv"
        rows = [f"1,{v}" for v in range(10)] + [f"2,{v + 0.5}" for v in range(10)] + [f"3,{v + 1}" for v in range(10)]
        p.write_text("\n".join(rows) + "\n")
        code, out, err = run(["ci-tcf2", p, "--theta1", 0.9, "--theta3", 0.9, "--seed", 1], capsys)
        assert code == EXIT_CODES["empty_interval"]
        assert json.loads(out)["result"]["empty"]
        assert json.loads(err)["error"]["context"]["diagnostic"] == "thresholds_crossed"

    def test_vus_text(self, synthetic_csv, capsys):
        code, out, _ = run(["vus", synthetic_csv, "--ties", "--format", "text"], capsys)
        assert code == 0 and out.splitlines()[-1].startswith("vus 0.74")

    def test_simulate_csv(self, capsys):
        code, out, _ = run(["simulate", "--method", "region3d", "--scenarios", "1", "--sizes", "20,20,20",
                            "--R", 100, "--seed", 3, "--format", "csv"], capsys)
        assert code == 0
        assert out.startswith("# plan: ")
        assert len(out.strip().splitlines()) == 2 + 3

    def test_simulate_needs_seed(self, capsys):
        code, _, err = run(["simulate", "--method", "region3d", "--scenarios", "1", "--sizes", "20,20,20"], capsys)
        assert code == 2 and "seed" in err

    def test_scenarios_command(self, capsys):
        code, out, _ = run(["scenarios"], capsys)
        assert code == 0 and len(json.loads(out)["scenarios"]) == 10

    def test_module_entry_point(self, synthetic_csv):
        proc = subprocess.run([sys.executable, "-m", "elroc3", "vus", str(synthetic_csv)], capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["result"]["vus"] == pytest.approx(0.740, abs=5e-4)
