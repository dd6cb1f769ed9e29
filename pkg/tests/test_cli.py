"""CLI dispatch, report schema, exit-code policy, determinism."""

import json
import math
import pathlib

import pytest

from dskernel.cli import main

SAMPLES = pathlib.Path(__file__).resolve().parent.parent / "sample_inputs"


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv) -> tuple[int, dict]:
    code, out = run(capsys, *argv)
    return code, json.loads(out)


class TestEval:
    def test_series(self, capsys):
        code, rep = run_json(
            capsys, "eval", "--series", str(SAMPLES / "zeta_series.json"),
            "--s", "2", "--order", "1000",
        )
        assert code == 0
        assert abs(rep["results"]["value"] - 1.6449) < 1e-3
        assert rep["results"]["error_radius"] < 1e-2

    def test_kernel(self, capsys):
        code, rep = run_json(
            capsys, "eval", "--matrix", str(SAMPLES / "diag_ones.json"),
            "--s", "2", "--u", "2", "--order", "1000",
        )
        assert code == 0
        assert abs(rep["results"]["value"] - 1.0823) < 1e-3

    def test_missing_inputs_is_usage_error(self, capsys):
        code, rep = run_json(capsys, "eval", "--s", "2")
        assert code == 2
        assert "error" in rep


class TestPsd:
    def test_example_arrowhead_report(self, capsys):
        code, rep = run_json(
            capsys, "psd", "--matrix", str(SAMPLES / "example_arrowhead.json"),
            "--max-order", "16",
        )
        assert code == 0
        res = rep["results"]
        assert res["verdict"] == "psd"
        assert abs(res["margin"] + 0.5) < 1e-12
        assert res["self_adjoint"] is True
        assert min(res["min_eigenvalues"]) >= -1e-9

    def test_not_psd_is_still_exit_zero(self, capsys, tmp_path):
        spec = {"variant": "dense", "entries": [[1, 2], [2, 1]], "rho": 0.0}
        f = tmp_path / "m.json"
        f.write_text(json.dumps(spec))
        code, rep = run_json(capsys, "psd", "--matrix", str(f), "--max-order", "2")
        assert code == 0
        assert rep["results"]["verdict"] == "not_psd"
        assert rep["results"]["witness_order"] == 2

    def test_non_self_adjoint_reported(self, capsys, tmp_path):
        spec = {"variant": "dense", "entries": [[1, [0, 1]], [[0, 1], 1]], "rho": 0.0}
        f = tmp_path / "m.json"
        f.write_text(json.dumps(spec))
        code, rep = run_json(capsys, "psd", "--matrix", str(f), "--max-order", "2")
        assert code == 0
        assert rep["results"]["verdict"] == "not_self_adjoint"


class TestSymbols:
    def test_diagonal_column(self, capsys):
        code, rep = run_json(
            capsys, "symbols", "--matrix", str(SAMPLES / "diag_ones.json"),
            "--n", "3", "--order", "6",
        )
        assert code == 0
        coeffs = rep["results"]["coefficients"]
        assert coeffs[2] == 1.0
        assert all(c == 0 for i, c in enumerate(coeffs) if i != 2)


class TestMembership:
    def test_query_file(self, capsys):
        code, rep = run_json(
            capsys, "membership", "--query", str(SAMPLES / "membership_query.json")
        )
        assert code == 0
        assert rep["results"]["member"] is True
        assert abs(rep["results"]["c_star"] - 1.0) < 1e-5

    def test_inline_fhat(self, capsys):
        code, rep = run_json(
            capsys, "membership", "--matrix", str(SAMPLES / "diag_ones.json"),
            "--fhat", "0,0,1", "--order", "5",
        )
        assert code == 0
        assert rep["results"]["member"] is True


class TestSk:
    def test_bundled_example(self, capsys):
        code, rep = run_json(capsys, "sk", "--example")
        assert code == 0
        res = rep["results"]
        assert abs(res["margin"] + 0.5) < 1e-12
        assert res["ladder_verdict"] == "psd"
        assert res["schur_det_positive"] is True

    def test_matrix_with_growth(self, capsys):
        code, rep = run_json(
            capsys, "sk", "--matrix", str(SAMPLES / "example_arrowhead.json"),
            "--growth-rho", "3.0",
        )
        assert code == 0
        assert rep["results"]["growth"]["bounded"] is False


class TestInvariance:
    def test_diagonal_invariant(self, capsys):
        code, rep = run_json(
            capsys, "invariance", "--matrix", str(SAMPLES / "diag_ones.json"),
            "--order", "32", "--seed", "5",
        )
        assert code == 0
        res = rep["results"]
        assert res["translation"]["invariant"] is True
        assert res["linear_subgroup"]["invariant"] is False

    def test_rank_one_witness(self, capsys):
        code, rep = run_json(
            capsys, "invariance", "--matrix", str(SAMPLES / "rank_one_2.json"),
            "--order", "4",
        )
        assert code == 0
        # kappa = 2**(-s-conj(u)) is diagonal-free... the matrix is e2 e2*,
        # which IS diagonal: translation invariant, linear subgroup not
        assert rep["results"]["translation"]["invariant"] is True
        assert rep["results"]["linear_subgroup"]["invariant"] is False
        assert rep["results"]["linear_subgroup"]["witness_kind"] is not None


class TestClassify:
    def test_diag_ones_not_quasi_invariant(self, capsys):
        code, rep = run_json(
            capsys, "classify", "--matrix", str(SAMPLES / "diag_ones.json"),
            "--order", "16",
        )
        assert code == 0
        assert rep["results"]["verdict"] == "not_quasi_invariant"
        assert "rank" in rep["results"]["reason"]

    def test_rank_one_quasi_invariant(self, capsys):
        code, rep = run_json(
            capsys, "classify", "--matrix", str(SAMPLES / "rank_one_2.json"),
            "--order", "2",
        )
        assert code == 0
        assert rep["results"]["verdict"] == "quasi_invariant"

    def test_deterministic_reports(self, capsys):
        args = ("classify", "--matrix", str(SAMPLES / "diag_ones.json"), "--order", "8")
        _, out1 = run(capsys, *args)
        _, out2 = run(capsys, *args)
        assert out1 == out2


class TestHomog:
    def test_verify_sweep(self, capsys):
        code, rep = run_json(capsys, "homog", "--verify", "--pairs", "200", "--seed", "7")
        assert code == 0
        assert rep["results"]["homogeneity"]["exact"] is True
        assert rep["results"]["homogeneity"]["nonzero_residuals"] == 0

    def test_span_gram(self, capsys):
        code, rep = run_json(
            capsys, "homog", "--span", str(SAMPLES / "span_zeta.json"), "--delta", "0.25"
        )
        assert code == 0
        res = rep["results"]
        assert res["gram"]["independent"] is True
        assert res["admissibility"]["admissible_up_to"] is True
        assert res["adjoint_condition"]["verdict"] == "finite"


class TestMerge:
    def test_sqrt2_grid(self, capsys):
        code, rep = run_json(
            capsys, "merge", "--omega", "sqrt2", "--m-max", "5", "--n-max", "5",
            "--limit", "3",
        )
        assert code == 0
        assert rep["results"]["count"] == 25
        assert rep["results"]["min_gap"] > 1e-9
        assert rep["results"]["entries"][0] == {"nu": 0.0, "m": 1, "n": 1}

    def test_rational_omega_collision_exit_2(self, capsys):
        code, rep = run_json(capsys, "merge", "--omega", "1", "--m-max", "2", "--n-max", "2")
        assert code == 2
        assert rep["error"]["kind"] == "CollisionError"


class TestErrorPolicy:
    def test_malformed_json_exit_2(self, capsys, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("{nope")
        code, rep = run_json(capsys, "psd", "--matrix", str(f))
        assert code == 2
        assert rep["error"]["kind"] == "SpecError"

    def test_unknown_variant_exit_2(self, capsys, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text(json.dumps({"variant": "mystery"}))
        code, rep = run_json(capsys, "psd", "--matrix", str(f))
        assert code == 2

    def test_missing_file_exit_2(self, capsys):
        code, rep = run_json(capsys, "psd", "--matrix", "/nonexistent.json")
        assert code == 2


class TestOutputModes:
    def test_csv_format(self, capsys):
        code, out = run(
            capsys, "merge", "--omega", "sqrt2", "--m-max", "2", "--n-max", "2",
            "--format", "csv", "--limit", "1",
        )
        assert code == 0
        assert out.startswith("key,value\n")
        assert "results.count,4" in out

    def test_out_file(self, tmp_path, capsys):
        target = tmp_path / "report.json"
        code = main(["sk", "--example", "--out", str(target)])
        capsys.readouterr()
        assert code == 0
        rep = json.loads(target.read_text())
        assert rep["command"] == "sk"
