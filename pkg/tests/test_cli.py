import json
import os

import numpy as np
import pytest

from confsphere.cli import RunConfig, build_parser, main
from confsphere.sphere_calc import omega


def run(tmp_path, *argv, name="report.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    data = json.loads(out.read_text()) if out.exists() else None
    return code, data


def test_verify_identities_gjms(tmp_path):
    code, data = run(tmp_path, "verify-identities", "--n", "5", "--k", "2", "--degree", "3", "--trials", "20", "--seed", "1")
    assert code == 0
    assert data["schema"] == 1 and data["passed"]
    assert data["checks"] == len(data["reports"]) > 0
    assert all(r["verdict"] for r in data["reports"])


def test_verify_identities_sigma2(tmp_path):
    code, data = run(tmp_path, "verify-identities", "--n", "6", "--sigma2", "--trials", "20")
    assert code == 0 and data["passed"]


@pytest.mark.parametrize(
    "argv",
    [
        ["verify-identities", "--n", "4"],
        ["verify-identities", "--n", "4", "--sigma2"],
        ["verify-identities", "--n", "5", "--k", "3"],
        ["verify-identities", "--n", "2", "--k", "1"],
        ["bubble-check", "--n", "5"],
        ["bubble-check", "--n", "5", "--k", "1", "--xi", "0,1.2"],
        ["bubble-check", "--n", "5", "--k", "1", "--xi", "abc"],
        ["balance", "--n", "5", "--k", "1", "--init", "bubble:x"],
        ["balance", "--n", "5", "--k", "1", "--init", "nonsense"],
        ["minimize", "--n", "5", "--k", "1", "--L", "12"],
        ["minimize", "--sigma2", "--n", "4"],
    ],
)
def test_invalid_configuration_exits_2(tmp_path, argv, capsys):
    code, data = run(tmp_path, *argv)
    assert code == 2
    assert data is None
    assert "invalid configuration" in capsys.readouterr().err


def test_argparse_rejects_missing_n():
    with pytest.raises(SystemExit) as exc:
        main(["bubble-check", "--k", "1"])
    assert exc.value.code == 2


def test_bubble_check_gjms(tmp_path):
    code, data = run(tmp_path, "bubble-check", "--n", "5", "--k", "1", "--xi", "0,0.3,0.6")
    assert code == 0
    assert [c["xi"] for c in data["cases"]] == [0.0, 0.3, 0.6]
    for case in data["cases"]:
        assert abs(case["deficit"]) < 1e-6
    assert data["cases"][0]["exact"] and data["cases"][0]["deficit"] == 0.0


def test_bubble_check_sigma2(tmp_path):
    code, data = run(tmp_path, "bubble-check", "--sigma2", "--n", "6", "--xi", "0,0.4")
    assert code == 0
    assert all(abs(c["deficit"]) < 1e-6 and c["min_sigma1"] > 0 for c in data["cases"])


def test_bubble_check_reports_violation(tmp_path):
    # a negative tolerance cannot be met
    code, data = run(tmp_path, "bubble-check", "--n", "5", "--k", "1", "--xi", "0.3", "--tol", "-1")
    assert code == 1 and not data["passed"]


def test_balance_constant(tmp_path):
    code, data = run(tmp_path, "balance", "--n", "5", "--k", "1", "--init", "constant")
    assert code == 0
    assert np.allclose(data["xi"], 0.0) and data["iterations"] == 0


def test_balance_bubble_becomes_constant(tmp_path):
    code, data = run(tmp_path, "balance", "--n", "5", "--k", "1", "--init", "bubble:0.4")
    assert code == 0
    assert np.linalg.norm(data["xi"]) == pytest.approx(0.4, abs=1e-8)
    assert data["balanced_max"] - data["balanced_min"] < 1e-8


def test_balance_perturbed(tmp_path):
    code, data = run(tmp_path, "balance", "--n", "5", "--k", "1", "--init", "perturbed:0.1")
    assert code == 0 and data["residual"] < 1e-10


def test_balance_polynomial_input(tmp_path):
    code, data = run(tmp_path, "balance", "--n", "5", "--k", "1", "--init", "poly:2 + 1/2 x0 + 1/4 x1 x2")
    assert code == 0 and data["residual"] < 1e-10


def test_balance_nonpositive_input_is_config_error(tmp_path):
    code, _ = run(tmp_path, "balance", "--n", "5", "--k", "1", "--init", "poly:x0")
    assert code == 2


def test_balance_non_convergence_exits_1(tmp_path):
    code, data = run(tmp_path, "balance", "--n", "5", "--k", "1", "--init", "bubble:0.4", "--tol", "1e-30")
    assert code == 1 and data["converged"] is False


def test_minimize_constant(tmp_path):
    code, data = run(tmp_path, "minimize", "--n", "5", "--k", "1", "--L", "6", "--init", "constant")
    assert code == 0
    assert data["iterations"] == 0
    assert data["quotient"] == pytest.approx(data["sharp"], rel=1e-13)


def test_minimize_gjms(tmp_path):
    code, data = run(tmp_path, "minimize", "--n", "5", "--k", "1", "--L", "6", "--seed", "1")
    assert code == 0
    assert abs(data["quotient"] - 15 / 4 * omega(5)) < 1e-4 * omega(5)


def test_reports_are_deterministic(tmp_path):
    for argv in (
        ["verify-identities", "--n", "5", "--k", "1", "--trials", "3", "--seed", "4"],
        ["minimize", "--n", "5", "--k", "1", "--L", "3", "--seed", "2"],
    ):
        run(tmp_path, *argv)
        first = (tmp_path / "report.json").read_bytes()
        run(tmp_path, *argv)
        assert (tmp_path / "report.json").read_bytes() == first


def test_stdout_json_without_out(capsys):
    assert main(["bubble-check", "--n", "5", "--k", "1", "--xi", "0"]) == 0
    captured = capsys.readouterr()
    data = json.loads(captured.out)
    assert data["schema"] == 1 and data["command"] == "bubble-check"
    assert "bubble-check" in captured.err


def test_summary_on_stdout_with_out(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["bubble-check", "--n", "5", "--k", "1", "--xi", "0", "--out", str(out)]) == 0
    assert "bubble-check" in capsys.readouterr().out


def test_writes_only_configured_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    out = tmp_path / "only.json"
    main(["balance", "--n", "5", "--k", "1", "--out", str(out)])
    assert os.listdir(tmp_path) == ["only.json"]


def test_run_config_defaults():
    args = build_parser().parse_args(["verify-identities", "--n", "5"])
    cfg = RunConfig.from_args(args)
    assert (cfg.degree, cfg.trials, cfg.seed) == (3, 20, 1)
