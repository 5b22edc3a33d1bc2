import json
import math

import numpy as np
import pytest
from unittest.mock import patch

import sys
from pathlib import Path
project_root_path = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root_path))

from cli.app import main
from cli.schemas import CheckEntry, ReportDocument
from config.settings import settings
from pipelines.verification import Check

DATA = settings.DATA_DIR


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_bounds_identity_all_zero(capsys):
    code, doc = run_cli(capsys, "bounds", "--cov-a", DATA / "identity2.csv", "--cov-b", DATA / "identity2.csv",
                        "--same-generator")
    assert code == 0
    assert doc["command"] == "bounds"
    assert doc["closed_form"] == 0.0
    assert doc["gelbrich"] == 0.0
    assert doc["eigenbasis_bound"] == 0.0
    assert doc["diag_bound"] == 0.0
    assert all(c["passed"] for c in doc["checks"])


def test_bounds_diagonal_vs_correlated(capsys):
    code, doc = run_cli(capsys, "bounds", "--cov-a", DATA / "diag_1_4.csv", "--cov-b", DATA / "pair_2_1.csv")
    assert code == 0
    assert doc["closed_form"] is None
    assert doc["eigenbasis_bound"] == pytest.approx(0.71744, abs=1e-5)
    assert doc["diag_bound"] == pytest.approx(doc["eigenbasis_bound"], abs=1e-12)
    assert doc["gelbrich"] >= doc["eigenbasis_bound"] - 1e-9
    assert doc["rotated_diag"] == pytest.approx([2.0, 2.0])


def test_bounds_dimension_mismatch_exits_3(capsys):
    code, doc = run_cli(capsys, "bounds", "--cov-a", DATA / "identity2.csv", "--cov-b", DATA / "identity3.csv")
    assert code == 3
    assert doc is None


def test_bounds_unparseable_file_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,x\n2,3\n")
    code, doc = run_cli(capsys, "bounds", "--cov-a", bad, "--cov-b", DATA / "identity2.csv")
    assert code == 2
    assert doc is None


def test_bounds_not_pd_exits_3(capsys, tmp_path):
    indefinite = tmp_path / "indef.csv"
    indefinite.write_text("1,2\n2,1\n")
    code, _ = run_cli(capsys, "bounds", "--cov-a", indefinite, "--cov-b", DATA / "identity2.csv")
    assert code == 3


def test_minimizer_identity(capsys):
    code, doc = run_cli(capsys, "minimizer", "--cov-a", DATA / "identity2.csv", "--target", "1,4")
    assert code == 0
    np.testing.assert_allclose(doc["minimizer"], [[1.0, 0.0], [0.0, 4.0]], atol=1e-14)
    assert doc["checks"][0]["name"] == "eigenbasis_equality.gap"
    assert doc["checks"][0]["passed"]


def test_minimizer_isotropic_target(capsys):
    code, doc = run_cli(capsys, "minimizer", "--cov-a", DATA / "pair_2_1.csv", "--target", "1,1")
    assert code == 0
    np.testing.assert_allclose(doc["minimizer"], np.eye(2), atol=1e-12)


def test_minimizer_non_diagonal_result(capsys):
    code, doc = run_cli(capsys, "minimizer", "--cov-a", DATA / "pair_2_1.csv", "--target", "1,9")
    assert code == 0
    m = np.array(doc["minimizer"])
    assert abs(m[0, 1]) > 1.0
    np.testing.assert_allclose(np.linalg.eigvalsh(m), [1.0, 9.0], atol=1e-10)
    assert doc["checks"][0]["lhs"] <= 1e-8


@pytest.mark.parametrize("target, expected", [("1,4,9", 3), ("1,0", 3), ("--target=-1,4", 3), ("1,,4", 2)])
def test_minimizer_bad_targets(capsys, target, expected):
    if target.startswith("--target="):
        argv = ["minimizer", "--cov-a", DATA / "pair_2_1.csv", target]
    else:
        argv = ["minimizer", "--cov-a", DATA / "pair_2_1.csv", "--target", target]
    code, _ = run_cli(capsys, *argv)
    assert code == expected


def test_empirical_same_law(capsys):
    code, doc = run_cli(capsys, "empirical", "--cov-a", DATA / "identity2.csv", "--cov-b", DATA / "identity2.csv",
                        "--generator", "gaussian", "--n", 256, "--seed", 5, "--trials", 5)
    assert code == 0
    assert doc["closed_form"] == 0.0
    empirical = doc["empirical"]
    assert empirical["trials"] == 5
    assert len(empirical["values"]) == 5
    assert empirical["min"] <= empirical["value"] <= empirical["max"]
    assert len(doc["checks"]) == 10
    assert all(c["passed"] for c in doc["checks"])


def test_empirical_student_t_and_mixture(capsys):
    code, doc = run_cli(capsys, "empirical", "--cov-a", DATA / "diag_1_4.csv", "--cov-b", DATA / "diag_4_1.csv",
                        "--generator", "student-t", "--df", 6, "--n", 64, "--seed", 1, "--trials", 2)
    assert code == 0
    assert doc["closed_form"] == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert doc["empirical"]["df"] == 6.0

    code, doc = run_cli(capsys, "empirical", "--cov-a", DATA / "diag_1_4.csv", "--cov-b", DATA / "diag_4_1.csv",
                        "--n", 64, "--seed", 1, "--trials", 2, "--target", "mixture")
    assert code == 0
    assert doc["closed_form"] is None
    assert doc["empirical"]["target"] == "mixture"


@pytest.mark.parametrize("flags, expected", [
    (["--generator", "student-t", "--df", "1.5"], 3),
    (["--generator", "student-t"], 3),
    (["--trials", "0"], 3),
    (["--n", "4096"], 4),
    (["--seed", "-1"], 3),
    (["--seed", str(2 ** 64)], 3),
    (["--spread", "1.5", "--target", "mixture"], 3),
    (["--generator", "foo"], 3),
    (["--n", "abc"], 3),
    (["--generator", "student-t", "--df", "abc"], 3),
    (["--target", "uniform"], 3),
])
def test_empirical_bad_flags(capsys, flags, expected):
    argv = ["empirical", "--cov-a", DATA / "identity2.csv", "--cov-b", DATA / "identity2.csv", "--n", "16"]
    code, doc = run_cli(capsys, *(argv + flags))
    assert code == expected
    assert doc is None


def test_usage_errors_exit_2(capsys):
    assert main([]) == 2
    assert main(["bounds"]) == 2
    assert main(["frobnicate"]) == 2


def test_verify_exit_codes_follow_checks(capsys):
    passing = [Check('x.ok', True, 0.0, 0.0, 0.0)]
    with patch("cli.app.VerificationRunner") as runner_cls:
        runner_cls.return_value.run_all.return_value = passing
        code, doc = run_cli(capsys, "verify", "--seed", 11, "--quick")
    runner_cls.assert_called_once_with(seed=11, quick=True)
    assert code == 0
    assert doc["inputs"] == {"seed": 11, "quick": True}

    failing = passing + [Check('x.bad', False, 1.0, 0.0, 0.0)]
    with patch("cli.app.VerificationRunner") as runner_cls:
        runner_cls.return_value.run_all.return_value = failing
        code, doc = run_cli(capsys, "verify")
    runner_cls.assert_called_once_with(seed=settings.DEFAULT_SEED, quick=False)
    assert code == 1
    assert [c["passed"] for c in doc["checks"]] == [True, False]


def test_verify_output_is_deterministic(capsys):
    checks = [Check('x.ok', True, 0.1, 0.2, 1e-9)]
    with patch("cli.app.VerificationRunner") as runner_cls:
        runner_cls.return_value.run_all.return_value = checks
        main(["verify", "--seed", "42"])
        first = capsys.readouterr().out
        main(["verify", "--seed", "42"])
        second = capsys.readouterr().out
    assert first == second


def test_report_schema_rejects_inconsistent_or_non_finite():
    with pytest.raises(ValueError):
        CheckEntry(name="x", passed=True, lhs=2.0, rhs=1.0, tolerance=0.0)
    with pytest.raises(ValueError):
        ReportDocument(command="bounds", gelbrich=float("inf"))


def test_verify_bad_seed_exits_3(capsys):
    with patch("cli.app.VerificationRunner") as runner_cls:
        code, doc = run_cli(capsys, "verify", "--seed", "seven")
    runner_cls.assert_not_called()
    assert code == 3
    assert doc is None
