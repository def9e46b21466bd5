import json

import pytest

from hyperprop.cli import main
from hyperprop.hypergraph import load


@pytest.fixture
def n4_file(tmp_path):
    p = tmp_path / "n4.hpg"
    p.write_text("hpg 1\nn 4\ne2 0 1\ne3 0 1 2\ne3 1 2 3\n")
    return p


def test_threshold_output(capsys):
    assert main(["threshold", "--epsilon", "1", "--r", "0.25"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "I=-2.000000000000"
    assert out[1] == "regime=Subcritical"
    assert main(["threshold", "--epsilon", "1", "--target", "-2"]) == 0
    assert capsys.readouterr().out.strip() == "critical_r=0.250000000000"


def test_check_connected_with_certificate(n4_file, tmp_path, capsys):
    cert = tmp_path / "cert.txt"
    assert main(["check", "--in", str(n4_file), "--certificate", str(cert)]) == 0
    assert cert.read_text().splitlines() == [
        "step 1: e2 0 1 -> 0 1",
        "step 2: e3 0 1 2 -> 2",
        "step 3: e3 1 2 3 -> 3",
    ]


def test_check_not_connected(tmp_path, capsys):
    p = tmp_path / "g.hpg"
    p.write_text("hpg 1\nn 4\ne2 0 1\ne2 2 3\n")
    assert main(["check", "--in", str(p), "--certificate", "-"]) == 3
    assert "closed 2: 0 1" in capsys.readouterr().out


def test_usage_and_domain_errors(tmp_path, capsys):
    assert main(["threshold", "--epsilon", "1", "--r", "0.25", "--bogus"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["threshold", "--epsilon", "0", "--r", "1"]) == 2
    assert "epsilon" in capsys.readouterr().err
    assert main(["check", "--in", str(tmp_path / "missing.hpg")]) == 2
    bad = tmp_path / "bad.hpg"
    bad.write_text("hpg 1\nn 3\ne2 0 7\n")
    assert main(["check", "--in", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_gen_then_census(tmp_path, capsys):
    g = tmp_path / "g.hpg"
    assert main(["gen", "--n", "300", "--epsilon", "0.5", "--r", "1", "--seed", "4", "--out", str(g)]) == 0
    assert load(g).n == 300
    out_csv = tmp_path / "c.csv"
    assert main(["census", "--in", str(g), "--epsilon", "0.5", "--r", "1", "--samples", "20",
                 "--mode", "pair", "--csv", str(out_csv)]) == 0
    assert "samples=20" in capsys.readouterr().out
    assert len(out_csv.read_text().splitlines()) == 21
    assert main(["census", "--n", "300", "--epsilon", "0.5", "--r", "1", "--engine", "paper-process"]) == 0


def test_chain(capsys):
    assert main(["chain", "--n", "4096", "--epsilon", "0.5", "--r", "1", "--trials", "2000"]) == 0
    out = capsys.readouterr().out
    assert "horizon=8" in out and "survival=" in out and "se=" in out


def test_sweep(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    out = tmp_path / "out.csv"
    cfg.write_text(json.dumps({"epsilon_grid": [1.0], "r_grid": [0.5], "n_list": [32],
                               "trials_per_cell": 2, "output_path": str(out)}))
    assert main(["sweep", "--config", str(cfg), "--workers", "1"]) == 0
    assert len(out.read_text().splitlines()) == 3


def test_verify_lemmas(capsys):
    assert main(["verify-lemmas"]) == 0
    assert "all lemma checks passed" in capsys.readouterr().out
    assert main(["verify-lemmas", "--budget", "10"]) == 2
