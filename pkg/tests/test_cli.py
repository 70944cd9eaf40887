from __future__ import annotations

import json

import jsonschema
import numpy as np
import pytest

from sdcones import cli, data, geometry, search

from conftest import equal_up_to_scaling, match_columns_by_pattern, support_pattern_of


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExamplesCommand:
    def test_writes_all_and_bit_identical(self, workdir, capsys):
        names = ["pentagon", "prism", "nonslack", "congruence", "selfpolar10"]
        code, out, _ = run_cli(capsys, "examples", *names, "--out", "a")
        assert code == 0
        code, _, _ = run_cli(capsys, "examples", *names, "--out", "b")
        assert code == 0
        files_a = sorted((workdir / "a").iterdir())
        files_b = sorted((workdir / "b").iterdir())
        assert [f.name for f in files_a] == [f.name for f in files_b]
        for fa, fb in zip(files_a, files_b):
            assert fa.read_bytes() == fb.read_bytes()
        # Files round-trip to the bundled constants exactly.
        back = geometry.load_matrix(workdir / "a" / "pentagon_slack.mat")
        assert np.array_equal(back, data.pentagon_slack())
        rays = geometry.load_matrix(workdir / "a" / "nonslack.mat")
        assert np.array_equal(rays, data.nonslack_extreme_matrix())

    def test_unknown_name(self, workdir, capsys):
        code, _, err = run_cli(capsys, "examples", "nonsense")
        assert code == cli.EXIT_PRECONDITION
        assert "unknown example" in err


class TestSlackCommand:
    def test_pentagon_golden(self, workdir, capsys):
        run_cli(capsys, "examples", "pentagon", "--out", ".")
        code, out, _ = run_cli(
            capsys, "slack", "pentagon_rays.cone", "--json", "--out", "slack.mat"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["cone_dim"] == 3
        m = np.asarray(payload["matrix"])
        sigma = match_columns_by_pattern(
            support_pattern_of(data.pentagon_slack()), support_pattern_of(m)
        )
        assert sigma is not None
        assert equal_up_to_scaling(
            data.pentagon_slack(), m[:, sigma], 1e-9, rows=False
        )
        saved = geometry.load_matrix(workdir / "slack.mat")
        assert np.array_equal(saved, m)

    def test_orthant_identity(self, workdir, capsys):
        geometry.save_cone(workdir / "orthant.cone", np.eye(3))
        code, out, _ = run_cli(capsys, "slack", "orthant.cone", "--json")
        assert code == 0
        m = np.asarray(json.loads(out)["matrix"])
        assert match_columns_by_pattern(
            support_pattern_of(np.eye(3)), support_pattern_of(m)
        ) is not None

    def test_degenerate_cone_exit_2(self, workdir, capsys):
        geometry.save_cone(
            workdir / "line.cone",
            np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]),
        )
        code, _, err = run_cli(capsys, "slack", "line.cone")
        assert code == cli.EXIT_PRECONDITION
        assert "pointed" in err

    def test_missing_file_exit_4(self, workdir, capsys):
        code, _, _ = run_cli(capsys, "slack", "missing.cone")
        assert code == cli.EXIT_PARSE


class TestDualCommand:
    def test_orthant(self, workdir, capsys):
        geometry.save_cone(workdir / "orthant.cone", np.eye(4))
        code, out, _ = run_cli(capsys, "dual", "orthant.cone")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "4 4"


class TestAnalyzeCommand:
    def _analyze(self, capsys, workdir, matrix, rank):
        geometry.save_matrix(workdir / "m.mat", matrix)
        code, out, _ = run_cli(capsys, "analyze", "m.mat", "--rank", str(rank))
        assert code == 0
        return json.loads(out)

    def test_pentagon_report(self, workdir, capsys):
        rep = self._analyze(capsys, workdir, data.pentagon_slack(), 3)
        res = rep["results"]
        assert res["rank"]["value"] == 3
        assert res["extremality"]["extreme"] is True
        assert res["extremality"]["intersection_dim"] == 1
        assert res["selfdual_certification"]["certified"] is True
        assert res["verdicts"]["dnn_extreme"] is True
        assert res["verdicts"]["cp_member"] is False
        assert res["verdicts"]["cpsd_member"] is False
        assert res["dnn5"]["label"] == "pentagon_slack"

    def test_nonslack_extreme_report(self, workdir, capsys):
        rep = self._analyze(capsys, workdir, data.nonslack_extreme_matrix(), 4)
        res = rep["results"]
        assert res["extremality"]["extreme"] is True
        assert res["slack_check"]["value"] is False
        assert any("zeros" in r for r in res["slack_check"]["reasons"])
        assert res["verdicts"].get("withheld") is True

    def test_identity_report(self, workdir, capsys):
        rep = self._analyze(capsys, workdir, np.eye(5), 5)
        res = rep["results"]
        assert res["extremality"]["extreme"] is False
        assert res["simplicial"]["value"] is True
        assert res["verdicts"]["cp_member"] is True
        assert res["verdicts"]["cpsd_member"] is True
        assert res["dnn5"]["label"] == "not_extreme"

    def test_schema_and_round_trip(self, workdir, capsys):
        schema = json.loads(cli.SCHEMA_PATH.read_text())
        for matrix, rank in [
            (data.pentagon_slack(), 3),
            (data.nonslack_extreme_matrix(), 4),
            (np.eye(5), 5),
            (data.prism_slack(), 4),
        ]:
            rep = self._analyze(capsys, workdir, matrix, rank)
            jsonschema.validate(rep, schema)
            report = cli.AnalysisReport(**rep)
            again = cli.AnalysisReport.from_json(report.to_json())
            assert again == report

    def test_every_result_has_provenance(self, workdir, capsys):
        rep = self._analyze(capsys, workdir, data.prism_slack(), 4)
        for name, entry in rep["results"].items():
            assert "provenance" in entry, name

    def test_asymmetric_rejected(self, workdir, capsys):
        geometry.save_matrix(workdir / "m.mat", np.array([[1.0, 2.0], [0.0, 1.0]]))
        code, _, err = run_cli(capsys, "analyze", "m.mat", "--rank", "2")
        assert code == cli.EXIT_PRECONDITION


class TestVerifyCommand:
    def test_orthant_true(self, workdir, capsys):
        geometry.save_cone(workdir / "o.cone", np.eye(3))
        code, out, _ = run_cli(capsys, "verify", "o.cone")
        assert code == 0
        assert json.loads(out)["self_dual"] is True

    def test_square_false(self, workdir, capsys):
        square = geometry.cone_over_polytope(
            np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        )
        geometry.save_cone(workdir / "sq.cone", square.generators)
        code, out, _ = run_cli(capsys, "verify", "sq.cone")
        assert code == 0
        payload = json.loads(out)
        assert payload["self_dual"] is False
        assert payload["certificate"] is None

    def test_prism_true(self, workdir, capsys):
        geometry.save_cone(workdir / "p.cone", data.prism_rays())
        code, out, _ = run_cli(capsys, "verify", "p.cone")
        assert code == 0
        payload = json.loads(out)
        assert payload["self_dual"] is True
        assert payload["certificate"]["min_eigenvalue"] >= -1e-9


class TestSearchCommand:
    def test_pentagon_writes_outputs(self, workdir, capsys):
        run_cli(capsys, "examples", "pentagon", "--out", ".")
        code, out, _ = run_cli(
            capsys, "search", "pentagon.support", "--rank", "3", "--out", "run"
        )
        assert code == 0
        transcript = json.loads(out)
        assert transcript["success"] is True
        disk = json.loads((workdir / "run" / "pentagon_transcript.json").read_text())
        assert disk == transcript
        cone = geometry.load_cone(workdir / "run" / "pentagon_realization.cone")
        assert cone.n_rays == 5 and cone.dim == 3

    def test_four_cycle_exit_3(self, workdir, capsys):
        search.save_support(workdir / "f.support", data.four_cycle_support().bits)
        code, _, err = run_cli(
            capsys, "search", "f.support", "--rank", "3", "--retries", "3"
        )
        assert code == cli.EXIT_NO_CONVERGENCE
        assert "no realization" in err

    def test_not_involutive_exit_2(self, workdir, capsys):
        (workdir / "bad.support").write_text("2\n11\n01\n")
        code, _, err = run_cli(capsys, "search", "bad.support", "--rank", "2")
        assert code == cli.EXIT_PRECONDITION
        assert "involutive" in err

    def test_bad_support_file_exit_4(self, workdir, capsys):
        (workdir / "bad.support").write_text("2\n1x\n01\n")
        code, _, _ = run_cli(capsys, "search", "bad.support", "--rank", "2")
        assert code == cli.EXIT_PARSE


class TestBatch:
    def test_jobs_preserve_order(self, workdir, capsys):
        geometry.save_cone(workdir / "a.cone", np.eye(2))
        geometry.save_cone(workdir / "b.cone", np.eye(3))
        code, out, _ = run_cli(
            capsys, "verify", "a.cone", "b.cone", "--jobs", "2"
        )
        assert code == 0
        # Outputs are concatenated in input order regardless of worker timing.
        assert out.index("a.cone") < out.index("b.cone")

    def test_determinism(self, workdir, capsys):
        search.save_support(workdir / "p.support", data.pentagon_support().bits)
        code1, out1, _ = run_cli(
            capsys, "search", "p.support", "--rank", "3", "--seed", "5", "--out", "r1"
        )
        code2, out2, _ = run_cli(
            capsys, "search", "p.support", "--rank", "3", "--seed", "5", "--out", "r2"
        )
        assert code1 == code2 == 0
        assert out1 == out2
        f1 = (workdir / "r1" / "p_realization.cone").read_bytes()
        f2 = (workdir / "r2" / "p_realization.cone").read_bytes()
        assert f1 == f2
