import csv
import io
import json
import subprocess
import sys

import pytest

from rashomon import curves
from rashomon.cli import main
from rashomon.estimator import RatioEstimate


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def predictions_csv(tmp_path):
    path = tmp_path / "preds.csv"
    path.write_text("a,b,c\n1,1,-1\n1,-1,-1\n-1,-1,-1\n")
    return path


class TestBasics:
    def test_sample_size_plain(self, capsys):
        code, out, _ = run(capsys, "sample-size", "--t", "0.01", "--alpha", "0.05")
        assert code == 0
        assert out.splitlines()[0] == "18445"

    def test_min_class_size(self, capsys):
        code, out, _ = run(capsys, "bounds", "min-class-size", "--f2", "100000", "--ratio", "0.001", "--confidence", "0.99")
        assert code == 0 and out.splitlines()[0] == "5156"

    def test_percent_ratio(self, capsys):
        assert run_json(capsys, "bounds", "min-class-size", "--f2", "100000", "--ratio", "5%")["f1_min"] == 104

    def test_unknown_flag(self, capsys):
        code, _, err = run(capsys, "sample-size", "--t", "0.1", "--bogus")
        assert code == 2 and "usage" in err

    def test_missing_subcommand(self, capsys):
        assert run(capsys)[0] == 2

    def test_computation_error(self, capsys):
        code, out, err = run(capsys, "bounds", "growth", "--C", "1", "--T", "3")
        assert code == 1 and out == ""
        assert len(err.strip().splitlines()) == 1 and err.startswith("rashomon: error:")

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "ratio", "--data", str(tmp_path / "nope.csv"))
        assert code == 1 and "error" in err

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = run(capsys, "sample-size", "--t", "0.05", "--format", "json", "--output", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["k"] == 738

    def test_csv_single_row(self, capsys):
        code, out, _ = run(capsys, "bounds", "growth", "--C", "2", "--T", "3", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 1 and rows[0]["count"] == "7"

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "rashomon", "sample-size", "--t", "0.01"], capture_output=True, text=True)
        assert res.returncode == 0 and res.stdout.splitlines()[0] == "18445"


class TestSchemas:
    def test_provenance_recorded(self, capsys):
        for argv in (["sample-size", "--t", "0.1"], ["bounds", "growth", "--C", "2", "--T", "2"]):
            obj = run_json(capsys, *argv, "--seed", "11")
            assert obj["seed"] == 11 and obj["command"]

    def test_ratio_round_trip(self, capsys):
        obj = run_json(capsys, "ratio", "--dataset", "xor", "--depth", "2", "--k", "3000", "--seed", "4")
        keys = ["ratio_fraction", "ratio_percent", "k", "t", "alpha", "estimator", "in_set_count", "seed"]
        est = RatioEstimate.from_dict({k: obj[k] for k in keys})
        assert est.samples == 3000 and est.seed == 4 and est.estimator == "importance"
        assert obj["ratio_percent"] == pytest.approx(100 * obj["ratio_fraction"])
        assert obj["alpha"] == 0.05

    def test_rejection_ratio(self, capsys):
        obj = run_json(capsys, "ratio", "--dataset", "separable", "--depth", "1", "--k", "500", "--estimator", "rejection")
        assert obj["estimator"] == "rejection" and 0 <= obj["ratio_fraction"] <= 1

    def test_curve_round_trip(self, capsys, tmp_path):
        obj = run_json(capsys, "curve", "--dataset", "xor", "--depths", "1-3", "--k", "2000")
        assert [p["label"] for p in obj["points"]] == ["1", "2", "3"]
        assert obj["elbows"] == {"maximin": "2", "geometric": "2", "risk_jump": "2"}
        saved = tmp_path / "curve.json"
        saved.write_text(json.dumps(obj))
        again = run_json(capsys, "elbow", "--curve", str(saved))
        assert again["elbows"] == obj["elbows"]
        back = curves.curve_from_dict(obj)
        assert back.risks() == [p["train_risk"] for p in obj["points"]]

    def test_curve_csv_feeds_elbow(self, capsys, tmp_path):
        code, out, _ = run(capsys, "curve", "--dataset", "xor", "--depths", "1-3", "--k", "2000", "--format", "csv")
        assert code == 0 and out.startswith("label,")
        saved = tmp_path / "curve.csv"
        saved.write_text(out)
        assert run_json(capsys, "elbow", "--curve", str(saved))["elbows"]["risk_jump"] == "2"

    def test_ridge_curve(self, capsys):
        obj = run_json(capsys, "curve", "--dataset", "poly_regression", "--kind", "ridge", "--degrees", "1-3", "--theta-rel", "0.1")
        assert obj["measure"] == "volume" and len(obj["points"]) == 3

    def test_elbow_inline(self, capsys):
        obj = run_json(capsys, "elbow", "--risks", "0.4,0.1,0.1,0.1", "--measures", "0.5,0.1,0.01,0.001", "--jump", "0.05")
        assert obj["elbows"]["risk_jump"] == "2"

    def test_ridge_volume(self, capsys):
        obj = run_json(capsys, "ridge-volume", "--dataset", "poly_regression", "--theta-rel", "0.1", "--reg", "0.01")
        assert obj["volume"] == pytest.approx(10 ** obj["log10_volume"])
        assert obj["train_risk_mean"] == pytest.approx(obj["train_risk_sum"] / obj["n"])
        assert obj["frobenius_lower_bound"] <= obj["volume"]

    def test_ridge_needs_theta(self, capsys):
        assert run(capsys, "ridge-volume", "--dataset", "poly_regression")[0] == 2

    def test_svm1(self, capsys):
        obj = run_json(capsys, "svm1-bound", "--dataset", "separable", "--theta", "1")
        assert {"center", "delta", "volume_lower_bound", "clipped"} <= set(obj)
        assert obj["volume_lower_bound"] == pytest.approx(2 * obj["delta"] ** 2)

    @pytest.mark.parametrize(
        "argv,key,expected",
        [
            (["thm-anchored", "--n", "200", "--f1", "1000", "--epsilon", "0.05", "--gamma", "0.1"], "rhs", 0.4255),
            (["thm-approx", "--n", "100", "--epsilon", "0.05", "--gamma", "0.05"], "rhs", 0.2224),
            (["subclass-prob", "--f2", "10", "--f1", "3", "--rset", "2"], "probability", 8 / 15),
            (["lemma-threshold", "--f1", "1", "--epsilon", "0.01"], "ratio_fraction", 0.99),
            (["membership-prob", "--n", "100", "--epsilon", "0.1"], "probability", 0.86466),
            (["pattern-limit", "--n", "10", "--theta", "0.3"], "limit", 176 / 1024),
            (["lipschitz", "--n", "200", "--rademacher", "0.05", "--lipschitz", "1", "--theta", "0.2"], "rhs", 0.19603),
            (["growth", "--C", "3", "--T", "4"], "count", 40),
            (["packing", "--values", "0,1,2,3", "--radius", "0.9"], "count", 4),
        ],
    )
    def test_bounds_verbs(self, capsys, argv, key, expected):
        obj = run_json(capsys, "bounds", *argv)
        assert obj[key] == pytest.approx(expected, abs=5e-5)
        assert obj["command"] == "bounds " + argv[0]

    def test_pattern_ratio(self, capsys, predictions_csv):
        obj = run_json(capsys, "pattern-ratio", "--enumerate-n", "5", "--theta", "0.2")
        assert (obj["numerator"], obj["denominator"]) == (6, 32)
        obj = run_json(capsys, "pattern-ratio", "--predictions", str(predictions_csv), "--labels", "1,1,1", "--theta", "0.35")
        # risks 1/3, 2/3, 1 against the all-positive labels; the set keeps the first two
        assert (obj["numerator"], obj["denominator"]) == (2, 3)

    def test_diversity(self, capsys, predictions_csv):
        obj = run_json(capsys, "diversity", "--predictions", str(predictions_csv))
        assert obj["models"] == 3 and obj["n"] == 3
        assert obj["average_hamming"] == pytest.approx(4 / 3)


class TestDeterminism:
    def test_byte_identical_json(self, capsys):
        argv = ["curve", "--dataset", "separable", "--depths", "1-2", "--k", "3000", "--seed", "9", "--format", "json"]
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second

    def test_workers_do_not_change_output(self, capsys):
        argv = ["ratio", "--dataset", "circles", "--depth", "3", "--k", "20000", "--format", "json"]
        one = run(capsys, *argv, "--workers", "1")[1]
        three = json.loads(run(capsys, *argv, "--workers", "3")[1])
        assert json.loads(one) == three

    def test_seed_changes_output(self, capsys):
        argv = ["ratio", "--dataset", "circles", "--depth", "3", "--k", "5000", "--format", "json"]
        a = json.loads(run(capsys, *argv, "--seed", "1")[1])
        b = json.loads(run(capsys, *argv, "--seed", "2")[1])
        assert a["ratio_fraction"] != b["ratio_fraction"]
