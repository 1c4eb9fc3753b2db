"""Command-line surface: reports, exit codes, round trips, determinism."""

import csv
import io
import json

import pytest

from casimir.cli import main

GOOD_SOLVABLE = {
    "name": "solvable-custom",
    "chart": {
        "coords": ["v", "y", "z"],
        "domain": {"v": [-0.9, 0.9], "y": [-1, 1], "z": [-1, 1]},
    },
    "structure_constants": {"r": 3, "C": [{"k": 1, "i": 1, "j": 2, "value": "1"}]},
    "generators": [["exp(-y)", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
}


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestVerify:
    @pytest.mark.parametrize("model", ["so3", "bianchi2", "abelian"])
    def test_builtin_models_pass(self, capsys, model):
        code, out = run(capsys, "verify", "--model", model)
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"]
        names = {c["name"] for c in doc["checks"]}
        assert {"structure-constants", "realization"} <= names

    def test_corrupted_constants_fail_with_witness(self, capsys, tmp_path):
        bad = json.loads(json.dumps(GOOD_SOLVABLE))
        bad["structure_constants"]["C"][0]["value"] = "2"
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(bad))
        code, out = run(capsys, "verify", "--model", str(p))
        assert code == 1
        doc = json.loads(out)
        real = next(c for c in doc["checks"] if c["name"] == "realization")
        assert not real["ok"]
        witnesses = [
            comp.get("witness")
            for pair in real["pairs"]
            for comp in pair["components"]
            if comp["verdict"] == "nonzero"
        ]
        assert witnesses and witnesses[0]

    def test_schema_error_exit_code(self, capsys, tmp_path):
        p = tmp_path / "nonsense.json"
        p.write_text(json.dumps({"chart": {"coords": ["x"]}}))
        code = main(["verify", "--model", str(p)])
        assert code == 2

    def test_missing_file_exit_code(self):
        assert main(["verify", "--model", "no-such-model"]) == 2

    def test_needs_exactly_one_input(self):
        assert main(["verify"]) == 2


class TestBuildMetric:
    def test_rotation_constant_metric(self, capsys):
        code, out = run(capsys, "build-metric", "--model", "so3")
        assert code == 0
        doc = json.loads(out)
        assert doc["metric"] == [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]
        assert not doc["cartan"]["degenerate"]

    def test_solvable_frame_metric(self, capsys):
        code, out = run(capsys, "build-metric", "--model", "bianchi2")
        assert code == 0
        doc = json.loads(out)
        assert doc["cartan"]["degenerate"]
        assert doc["metric"][1][1] == "1"
        assert "exp(2*y)" in doc["metric"][0][0]

    def test_abelian_identity_via_frame(self, capsys):
        code, out = run(capsys, "build-metric", "--model", "abelian")
        assert code == 0
        doc = json.loads(out)
        assert doc["metric"] == [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]

    def test_solver_limitation_exit_code(self, capsys, tmp_path):
        doc = json.loads(json.dumps(GOOD_SOLVABLE))
        doc["chart"]["coords"] = ["x", "y", "z"]
        doc["chart"]["domain"] = {"x": [-1, 1], "y": [-1, 1], "z": [-1, 1]}
        doc["generators"] = [["1", "0", "0"], ["x", "1", "0"], ["0", "0", "1"]]
        p = tmp_path / "xyz.json"
        p.write_text(json.dumps(doc))
        code = main(["build-metric", "--model", str(p)])
        assert code == 3

    def test_user_frame_rescues_the_build(self, capsys, tmp_path):
        doc = json.loads(json.dumps(GOOD_SOLVABLE))
        doc["chart"]["coords"] = ["x", "y", "z"]
        doc["chart"]["domain"] = {"x": [-1, 1], "y": [-1, 1], "z": [-1, 1]}
        doc["generators"] = [["1", "0", "0"], ["x", "1", "0"], ["0", "0", "1"]]
        doc["frame"] = {"vectors": [["exp(y)", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]}
        p = tmp_path / "xyz_frame.json"
        p.write_text(json.dumps(doc))
        code, out = run(capsys, "build-metric", "--model", str(p))
        assert code == 0
        got = json.loads(out)["metric"]
        assert got[0][0] == "exp(2*y) + x^2"


class TestHarmonics:
    def test_point_series_eigenvalue(self, capsys):
        code, out = run(capsys, "harmonics", "bianchi2", "--point-series",
                        "--n", "1", "--m", "0", "--nu", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["eigenvalues"]["G"] == "5"
        assert doc["certified"]

    def test_scalar_weight_zero(self, capsys):
        code, out = run(capsys, "harmonics", "so3", "--l", "0")
        assert code == 0
        doc = json.loads(out)
        assert doc["components"] == {"n=0,m=0": "1"}

    def test_tensor_family_component_count(self, capsys):
        code, out = run(capsys, "harmonics", "so3", "--type", "2,0", "--l", "2", "--m", "1")
        assert code == 0
        doc = json.loads(out)
        assert len(doc["components"]) == 5  # five weighted slots at fixed m
        assert len(doc["assemblies"]) == 1

    def test_hyper_family(self, capsys):
        code, out = run(capsys, "harmonics", "bianchi2", "--hyper",
                        "--mu", "0", "--nu", "0", "--lam", "1")
        assert code == 0
        doc = json.loads(out)
        assert doc["certified"]

    def test_label_out_of_range_exit_code(self, capsys):
        assert main(["harmonics", "so3", "--l", "1", "--m", "5"]) == 1
        assert main(["harmonics", "bianchi2", "--point-series",
                     "--n", "1", "--m", "1", "--nu", "0"]) == 1

    def test_grid_csv(self, capsys):
        code, out = run(
            capsys, "harmonics", "so3", "--l", "1", "--m", "0", "--format", "csv",
            "--grid", "theta=0.2:3.0:3", "--grid", "phi=0.1:6.0:2",
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0][:2] == ["theta", "phi"]
        assert len(rows) == 1 + 6
        # 17 significant digits in every numeric cell
        val = float(rows[1][2])
        assert f"{val:.17g}" == rows[1][2]

    def test_grid_json_samples(self, capsys):
        code, out = run(capsys, "harmonics", "so3", "--l", "0", "--grid", "theta=0.5:2.5:4")
        assert code == 0
        doc = json.loads(out)
        assert len(doc["samples"]["rows"]) == 4


class TestFamilyRoundTrip:
    def test_scalar_family_recertifies(self, capsys, tmp_path):
        p = tmp_path / "fam.json"
        code = main(["harmonics", "so3", "--l", "1", "--out", str(p)])
        assert code == 0
        code, out = run(capsys, "verify", "--family", str(p))
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"]
        assert all(c["stored"] == c["recomputed"] for c in doc["checks"])

    def test_tensor_family_recertifies(self, capsys, tmp_path):
        p = tmp_path / "fam.json"
        code = main(["harmonics", "so3", "--type", "2,0", "--l", "1", "--out", str(p)])
        assert code == 0
        code, out = run(capsys, "verify", "--family", str(p))
        assert code == 0
        assert json.loads(out)["ok"]

    def test_point_series_recertifies(self, capsys, tmp_path):
        p = tmp_path / "fam.json"
        code = main(["harmonics", "bianchi2", "--point-series",
                     "--n", "2", "--m", "0", "--nu", "1", "--out", str(p)])
        assert code == 0
        code, out = run(capsys, "verify", "--family", str(p))
        assert code == 0
        assert json.loads(out)["ok"]


class TestDeterminism:
    def test_report_digest_is_stable(self, capsys):
        _, a = run(capsys, "verify", "--model", "so3", "--seed", "11")
        _, b = run(capsys, "verify", "--model", "so3", "--seed", "11")
        da, db = json.loads(a), json.loads(b)
        assert da["digest"] == db["digest"]
        # body excluding timings is byte-identical
        da.pop("timings"), db.pop("timings")
        assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)

    def test_seed_changes_inputs_echo_only_not_verdicts(self, capsys):
        _, a = run(capsys, "verify", "--model", "so3", "--seed", "1")
        _, b = run(capsys, "verify", "--model", "so3", "--seed", "2")
        da, db = json.loads(a), json.loads(b)
        assert da["ok"] and db["ok"]
        assert da["digest"] != db["digest"]  # the seed is part of the report

    def test_env_seed_default(self, capsys, monkeypatch):
        monkeypatch.setenv("CASIMIR_SEED", "42")
        _, out = run(capsys, "verify", "--model", "abelian")
        assert json.loads(out)["seed"] == 42


class TestReduceAndResidual:
    def test_reduce_rotation_weighted_slot(self, capsys):
        code, out = run(capsys, "reduce", "--model", "so3", "--lower", "+1")
        assert code == 0
        doc = json.loads(out)
        terms = {tuple(t["derivative"]): t["coefficient"] for t in doc["operator"]["terms"]}
        assert terms[(0, 2, 0)] == "1"
        assert (0, 0, 1) in terms  # the weighted first-order term

    def test_reduce_solvable_is_plain_casimir(self, capsys):
        code, out = run(capsys, "reduce", "--model", "bianchi2", "--lower", "1,2")
        assert code == 0
        doc = json.loads(out)
        terms = {tuple(t["derivative"]): t["coefficient"] for t in doc["operator"]["terms"]}
        assert terms[(0, 0, 2)] == "1"
        assert terms[(2, 0, 0)] == "1 + v^2"

    def test_reduce_unknown_leg(self, capsys):
        assert main(["reduce", "--model", "so3", "--lower", "nope"]) == 2

    def test_residual_accepts_eigenfunction(self, capsys, tmp_path):
        p = tmp_path / "t.json"
        p.write_text(json.dumps({"type": [0, 0], "components": ["cos(theta)"]}))
        assert main(["residual", "--model", "so3", "--tensor", str(p),
                     "--eigenvalue", "-2"]) == 0

    def test_residual_rejects_wrong_eigenvalue(self, capsys, tmp_path):
        p = tmp_path / "t.json"
        p.write_text(json.dumps({"type": [0, 0], "components": ["cos(theta)"]}))
        assert main(["residual", "--model", "so3", "--tensor", str(p),
                     "--eigenvalue", "-6"]) == 1

    def test_residual_on_monomials(self, capsys, tmp_path):
        p = tmp_path / "t.json"
        p.write_text(json.dumps({
            "monomials": [
                {"upper": [], "lower": ["1"], "scalar": "exp(z)*(1+v^2)^(1/2)"},
            ]
        }))
        assert main(["residual", "--model", "bianchi2", "--tensor", str(p),
                     "--eigenvalue", "2"]) == 0
