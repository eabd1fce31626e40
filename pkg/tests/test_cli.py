import json
import subprocess
import sys

import pytest

from ordsub import cli


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv + ["--format", "structured"])
    return code, (json.loads(out) if out else None), err


@pytest.fixture
def tightness_file(tmp_path, capsys):
    path = str(tmp_path / "tightness.json")
    code, _, _ = run(capsys, ["generate", "tightness", "--k", "2",
                              "--delta", "1e-6", "-o", path])
    assert code == 0
    return path


@pytest.fixture
def coverage_file(tmp_path, capsys):
    path = str(tmp_path / "coverage.json")
    code, _, _ = run(capsys, ["generate", "random-coverage", "--seed", "2",
                              "--movies", "4", "--types", "3",
                              "--max-patience", "2", "-o", path])
    assert code == 0
    return path


@pytest.fixture
def kl_file(tmp_path, capsys):
    path = str(tmp_path / "kl.json")
    code, _, _ = run(capsys, ["generate", "kl-counterexample",
                              "--w1", "3.5", "-o", path])
    assert code == 0
    return path


@pytest.fixture
def calibration_file(tmp_path, capsys):
    path = str(tmp_path / "cal.json")
    code, _, _ = run(capsys, ["generate", "random-calibration", "--seed", "3",
                              "--movies", "5", "--genres", "3", "--k", "4",
                              "-o", path])
    assert code == 0
    return path


class TestSolve:
    def test_tightness_ratio_is_half(self, capsys, tightness_file):
        code, report, _ = run_json(capsys, [
            "solve", tightness_file, "--objective", "coverage", "-k", "2",
            "--oracle"])
        assert code == 0
        assert report["greedy"]["sequence"] == [1, 0]
        assert report["optimum"]["sequence"] == [0, 1]
        assert report["ratio"] == pytest.approx(0.5, abs=1e-5)

    def test_table_output_mentions_all_parts(self, capsys, tightness_file):
        code, out, _ = run(capsys, ["solve", tightness_file, "--objective",
                                    "coverage", "-k", "2", "--oracle"])
        assert code == 0
        for token in ("greedy", "optimum", "ratio", "coverage"):
            assert token in out

    def test_structured_report_shape(self, capsys, tightness_file):
        code, report, _ = run_json(capsys, [
            "solve", tightness_file, "--objective", "coverage", "-k", "2"])
        assert code == 0
        keys = list(report)
        assert keys[0] == "command" and keys[-1] == "wall_time_s"
        assert report["backend"] in ("numba", "numpy")
        assert "optimum" not in report

    def test_repeats_flag(self, capsys, coverage_file):
        code, report, _ = run_json(capsys, [
            "solve", coverage_file, "--objective", "coverage", "-k", "3",
            "--repeats"])
        assert code == 0
        assert report["allow_repeats"] is True
        assert len(report["greedy"]["sequence"]) == 3

    def test_variable_length_with_oracle(self, capsys, calibration_file):
        code, report, _ = run_json(capsys, [
            "solve", calibration_file, "--objective", "hellinger", "-k", "3",
            "--variable-length", "--oracle"])
        assert code == 0
        assert report["solver"] == "variable-length greedy"
        assert report["ratio"] == pytest.approx(1.0, abs=0.5)
        assert 1 <= len(report["greedy"]["sequence"]) <= 3

    def test_kl_objective_reports_undefined_ratio(self, capsys, kl_file):
        code, report, _ = run_json(capsys, [
            "solve", kl_file, "--objective", "kl", "-k", "2", "--oracle"])
        assert code == 0
        # optimum here is positive, so the ratio is defined and equals 1
        assert report["ratio"] == pytest.approx(1.0, abs=1e-12)

    def test_threads_flag(self, capsys, tightness_file):
        code, _, _ = run(capsys, ["solve", tightness_file, "--objective",
                                  "coverage", "-k", "2", "--threads", "1"])
        assert code == 0


class TestSolveErrors:
    def test_bad_k(self, capsys, tightness_file):
        code, _, err = run(capsys, ["solve", tightness_file, "--objective",
                                    "coverage", "-k", "0"])
        assert code == 2 and "error:" in err

    def test_unknown_selector(self, capsys, calibration_file):
        code, _, err = run(capsys, ["solve", calibration_file, "--objective",
                                    "cosine", "-k", "2"])
        assert code == 2 and "unknown objective selector" in err

    def test_selector_kind_mismatch(self, capsys, tightness_file):
        code, _, err = run(capsys, ["solve", tightness_file, "--objective",
                                    "hellinger", "-k", "2"])
        assert code == 2 and "calibration instance" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, ["solve", str(tmp_path / "absent.json"),
                                    "--objective", "coverage", "-k", "2"])
        assert code == 2 and "error:" in err

    def test_bad_power_alpha(self, capsys, calibration_file):
        code, _, err = run(capsys, ["solve", calibration_file, "--objective",
                                    "power:1.5", "-k", "2"])
        assert code == 2 and "strictly" in err

    def test_variable_length_needs_overlap(self, capsys, kl_file):
        code, _, err = run(capsys, ["solve", kl_file, "--objective", "kl",
                                    "-k", "2", "--variable-length"])
        assert code == 2 and "overlap objective" in err

    def test_oracle_budget_enforced(self, capsys, calibration_file):
        code, _, err = run(capsys, ["solve", calibration_file, "--objective",
                                    "hellinger", "-k", "3", "--oracle",
                                    "--budget", "10"])
        assert code == 2 and "budget" in err


class TestVerify:
    def test_coverage_instance_holds(self, capsys, coverage_file):
        code, report, _ = run_json(capsys, [
            "verify", coverage_file, "--objective", "coverage",
            "--max-total-len", "3"])
        assert code == 0
        assert report["holds"] is True
        assert report["violations"] == []
        assert report["checked"] > 0

    def test_log_score_fails_with_witnesses(self, capsys, kl_file):
        code, report, _ = run_json(capsys, [
            "verify", kl_file, "--objective", "kl"])
        assert code == 1
        assert report["holds"] is False
        assert len(report["violations"]) == 6
        first = report["violations"][0]
        assert set(first) == {"prefix", "element", "alternative", "suffix",
                              "lhs", "rhs"}
        assert first["lhs"] < first["rhs"]

    def test_table_prints_witness_lines(self, capsys, kl_file):
        code, out, _ = run(capsys, ["verify", kl_file, "--objective", "kl"])
        assert code == 1
        assert "holds     : no" in out
        assert "violation :" in out

    def test_reports_stable_except_wall_time(self, capsys, coverage_file):
        argv = ["verify", coverage_file, "--objective", "coverage",
                "--max-total-len", "3"]
        _, first, _ = run_json(capsys, argv)
        _, second, _ = run_json(capsys, argv)
        first.pop("wall_time_s"), second.pop("wall_time_s")
        assert first == second


class TestReproduce:
    def test_a2_example_passes(self, capsys):
        code, report, _ = run_json(capsys, ["reproduce", "a2-example"])
        assert code == 0
        assert report["all_pass"] is True
        assert [c["pass"] for c in report["values"]] == [True] * 4
        assert all(i["holds"] for i in report["inequalities"])

    def test_tightness_passes(self, capsys):
        code, report, _ = run_json(capsys, ["reproduce", "tightness:4"])
        assert code == 0
        assert report["ratio"] == pytest.approx(0.5, abs=1e-4)

    def test_a1_table_documents_the_misprinted_row(self, capsys):
        # six of seven published rows reproduce; the w1=3.5 row does not,
        # in either log base, so the command reports a failed check
        code, report, _ = run_json(capsys, ["reproduce", "a1-table"])
        assert code == 1
        assert report["all_pass"] is False
        assert report["log_base"] == "natural"
        assert report["tried_base2"] is True
        flags = {r["w1"]: r["pass"] for r in report["rows"]}
        assert flags == {1.1: True, 1.5: True, 2.0: True, 3.5: False,
                         5.0: True, 10.0: True, 100.0: True}

    def test_a1_table_table_format_marks_row(self, capsys):
        code, out, _ = run(capsys, ["reproduce", "a1-table"])
        assert code == 1
        assert "NO" in out and "all checks pass: no" in out

    def test_unknown_target(self, capsys):
        code, _, err = run(capsys, ["reproduce", "a3-created"])
        assert code == 2 and "unknown reproduce target" in err

    def test_bad_tightness_k(self, capsys):
        code, _, err = run(capsys, ["reproduce", "tightness:x"])
        assert code == 2 and "tightness" in err


class TestGenerate:
    def test_deterministic_bytes(self, capsys, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        for path in (a, b):
            code, _, _ = run(capsys, ["generate", "random-calibration",
                                      "--seed", "7", "--quality",
                                      "--tradeoff", "0.5", "-o", path])
            assert code == 0
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_metadata_recorded(self, capsys, tmp_path):
        path = str(tmp_path / "meta.json")
        code, report, _ = run_json(capsys, [
            "generate", "random-coverage", "--seed", "11", "--name", "probe",
            "-o", path])
        assert code == 0
        assert report["metadata"]["name"] == "probe"
        assert report["metadata"]["seed"] == 11
        assert report["metadata"]["params"]["n_movies"] == 5

    def test_unknown_generator(self, capsys, tmp_path):
        code, _, err = run(capsys, ["generate", "magic",
                                    "-o", str(tmp_path / "x.json")])
        assert code == 2 and "unknown generator" in err

    def test_generated_files_load_everywhere(self, capsys, tmp_path,
                                             kl_file, coverage_file):
        for path, objective in ((kl_file, "kl"), (coverage_file, "coverage")):
            code, _, _ = run(capsys, ["solve", path, "--objective", objective,
                                      "-k", "2"])
            assert code == 0


def test_module_entry_point_reports_version():
    out = subprocess.run([sys.executable, "-m", "ordsub", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip().endswith("0.1.0")
