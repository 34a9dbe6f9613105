"""CLI subcommands exercised through main(argv)."""

import json

import pytest

from netoco.cli import main

RANDOM_CFG = {
    "kind": "random", "graph": "cycle", "graph_params": {"n": 5},
    "horizon": 3, "dim": 1, "mu": 1.0, "l_f": 2.0, "l_T": 0.2, "l_S": 0.1,
    "seed": 0,
}


@pytest.fixture()
def cfg_json(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(RANDOM_CFG))
    return str(path)


@pytest.fixture()
def cfg_toml(tmp_path):
    lines = ['kind = "random"', 'graph = "cycle"', "horizon = 3", "dim = 1",
             "mu = 1.0", "l_f = 2.0", "l_T = 0.2", "l_S = 0.1", "seed = 0",
             "[graph_params]", "n = 5"]
    path = tmp_path / "inst.toml"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_run_lpc_with_artifacts(cfg_json, tmp_path, capsys):
    out = tmp_path / "traj.json"
    csv = tmp_path / "traj.csv"
    code = main(["run-lpc", "--config", cfg_json, "--k", "3", "--r", "2",
                 "--out", str(out), "--csv", str(csv)])
    assert code == 0
    text = capsys.readouterr().out
    assert "lpc k=3 r=2: cost" in text
    assert json.loads(out.read_text())["schema"] == "netoco-trajectory/1"
    assert csv.read_text().startswith("t,v,dim,value")


def test_toml_and_json_configs_agree(cfg_json, cfg_toml, capsys):
    assert main(["run-opt", "--config", cfg_json]) == 0
    line_json = capsys.readouterr().out.strip()
    assert main(["run-opt", "--config", cfg_toml]) == 0
    line_toml = capsys.readouterr().out.strip()
    assert line_json == line_toml
    assert line_json.startswith("offline optimum: cost")


def test_run_opt_backend_flag(cfg_json, capsys):
    assert main(["run-opt", "--config", cfg_json,
                 "--backend", "projected-gradient", "--tol", "1e-11"]) == 0
    assert "offline optimum" in capsys.readouterr().out


def test_perturbation_subcommand(cfg_json, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["perturbation", "--config", cfg_json, "--t", "2", "--v", "0",
                 "--k", "3", "--r", "2", "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "[ok]" in text and "max_response" in text
    assert json.loads(out.read_text())["kind"] == "perturbation"


def test_cr_sweep_subcommand(cfg_json, tmp_path, capsys):
    csv = tmp_path / "sweep.csv"
    code = main(["cr-sweep", "--config", cfg_json, "--k-list", "2,3",
                 "--r-list", "1,2", "--csv", str(csv)])
    assert code == 0
    assert "min_ratio" in capsys.readouterr().out
    header = csv.read_text().splitlines()[0]
    assert header == "k,r,ratio,ceiling,gate_lhs,gate_ok"


def test_lower_bound_subcommand(capsys):
    code = main(["lower-bound", "--blocks", "6", "--block-size", "2",
                 "--coupling", "1.0", "--r-list", "1,2", "--num-seeds", "5"])
    assert code == 0
    assert "lambda_S" in capsys.readouterr().out


def test_pricing_subcommand(tmp_path, capsys):
    cfg = {"kind": "pricing-random", "graph": "path", "graph_params": {"n": 4},
           "horizon": 3, "seed": 1}
    path = tmp_path / "pricing.json"
    path.write_text(json.dumps(cfg))
    code = main(["pricing", "--config", str(path), "--k", "3", "--r", "2"])
    assert code == 0
    assert "revenue_ratio" in capsys.readouterr().out


def test_pricing_rejects_wrong_kind(cfg_json, capsys):
    code = main(["pricing", "--config", cfg_json, "--k", "3", "--r", "2"])
    assert code == 2
    assert "pricing-random" in capsys.readouterr().err


def test_theory_subcommand(tmp_path, capsys):
    out = tmp_path / "constants.json"
    code = main(["theory", "--mu", "1.0", "--l-f", "2.0", "--l-T", "4.0",
                 "--l-S", "0.0", "--delta", "3", "--k", "4", "--r", "2",
                 "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["params"]["rho_T"] ** 2 == pytest.approx(0.5, abs=1e-12)
    assert payload["cr_bound"]["k"] == 4
    printed = json.loads(capsys.readouterr().out.rsplit("wrote", 1)[0])
    assert printed == payload


def test_theory_explicit_h(capsys):
    code = main(["theory", "--mu", "1.0", "--l-f", "2.0", "--l-T", "0.1",
                 "--l-S", "0.05", "--delta", "2", "--k", "3", "--r", "2",
                 "--h", "1,2,2"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["params"]["h_values"] == [1.0, 2.0, 2.0]


def test_missing_config_exits_2(capsys):
    assert main(["run-lpc", "--config", "/nonexistent.json",
                 "--k", "2", "--r", "1"]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"kind": "mystery"}))
    assert main(["run-opt", "--config", str(path)]) == 2
    assert "unknown instance kind" in capsys.readouterr().err


def test_check_all_battery(capsys):
    assert main(["check-all"]) == 0
    text = capsys.readouterr().out
    assert "all checks passed" in text
    assert "[FAIL]" not in text
