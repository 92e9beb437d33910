import json
import subprocess
import sys

import pytest

from dirichletlab.cli import main, read_config_file
from dirichletlab.errors import ValidationError


def run_cli(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])


def only_json(tmp_path, prefix):
    files = sorted(tmp_path.glob(f"{prefix}_*.json"))
    assert files, f"no {prefix} report written"
    return json.loads(files[-1].read_text())


def test_eval_writes_report(tmp_path, capsys):
    assert run_cli(tmp_path, "eval", "--seq", "naturals", "--sigma", "1.0") == 0
    out = capsys.readouterr().out
    assert "F(1)" in out
    data = only_json(tmp_path, "eval")
    assert data["kind"] == "eval"
    assert "partial_sum" in data


def test_scan_subcommand(tmp_path, capsys):
    code = run_cli(
        tmp_path, "scan", "--seq", "naturals", "--seed", "7",
        "--sigma-lo", "0.6", "--sigma-hi", "2.0",
    )
    assert code == 0
    data = only_json(tmp_path, "scan")
    assert data["kind"] == "sign_scan"
    assert "sign changes" in capsys.readouterr().out


def test_inequalities_success_exit(tmp_path, capsys):
    code = run_cli(tmp_path, "inequalities", "--n", "8", "--instances", "10")
    assert code == 0
    assert "0 violations" in capsys.readouterr().out


def test_clt_csv(tmp_path, capsys):
    code = main([
        "clt", "--seq", "naturals", "--sigma", "0.6", "--cutoff", "1e5",
        "--trials", "50", "--out", str(tmp_path), "--csv",
    ])
    assert code == 0
    assert "KS distance" in capsys.readouterr().out
    csvs = list(tmp_path.glob("clt_*.csv"))
    assert csvs and csvs[0].read_text().startswith("sample\n")


def test_exit_codes(tmp_path, capsys):
    # validation error -> 1
    assert run_cli(tmp_path, "scan", "--sigma-lo", "3.0", "--sigma-hi", "1.0") == 1
    # resource budget error -> 2 (scale rule far past any term budget)
    assert run_cli(tmp_path, "variance-profile", "--seq", "naturals",
                   "--sigmas", "0.505") == 2
    # unknown flag -> validation, not resource
    assert main(["eval", "--bogus-flag"]) == 1


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "# exceedance study\n"
        "seq = naturals\n"
        "trials = 8\n"
        "level = 1.5\n"
        "scales = 100,1000\n"
    )
    code = main([
        "exceedance", "--config", str(cfg), "--trials", "5",
        "--out", str(tmp_path),
    ])
    assert code == 0
    data = only_json(tmp_path, "exceedance")
    assert data["config"]["trials"] == 5  # flag wins
    assert data["config"]["level"] == 1.5  # file wins over default
    assert data["config"]["scales"] == [100.0, 1000.0]


def test_config_file_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("not_a_key = 3\n")
    assert main(["exceedance", "--config", str(cfg)]) == 1


def test_read_config_file_errors(tmp_path):
    p = tmp_path / "broken.cfg"
    p.write_text("just a line without equals\n")
    with pytest.raises(ValidationError, match="broken.cfg:1"):
        read_config_file(str(p))


def test_dry_run_prints_plan_without_output(tmp_path, capsys):
    code = run_cli(tmp_path, "no-zeros", "--trials", "99", "--dry-run")
    assert code == 0
    out = capsys.readouterr().out
    assert "dry-run" in out and '"trials": 99' in out
    assert not list(tmp_path.glob("no-zeros_*"))


def test_same_invocation_same_payload(tmp_path):
    args = ["exceedance", "--trials", "6", "--out"]
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert main(args + [str(d1)]) == 0
    assert main(args + [str(d2)]) == 0
    f1 = sorted(d1.glob("*.json"))[0]
    f2 = sorted(d2.glob("*.json"))[0]
    assert f1.name == f2.name
    assert f1.read_bytes() == f2.read_bytes()


def test_workers_flag_payload_identical(tmp_path):
    base = ["exceedance", "--trials", "10", "--out"]
    d1, d2 = tmp_path / "w1", tmp_path / "w2"
    assert main(base + [str(d1), "--workers", "1"]) == 0
    assert main(base + [str(d2), "--workers", "3"]) == 0
    b1 = sorted(d1.glob("*.json"))[0].read_bytes()
    b2 = sorted(d2.glob("*.json"))[0].read_bytes()
    assert b1 == b2


def test_report_subcommand(tmp_path, capsys):
    assert run_cli(tmp_path, "exceedance", "--trials", "4") == 0
    f = sorted(tmp_path.glob("exceedance_*.json"))[0]
    assert main(["report", "--input", str(f), "--out", str(tmp_path)]) == 0
    assert "kind=exceedance" in capsys.readouterr().out


def test_svg_emission(tmp_path):
    code = main([
        "variance-profile", "--seq", "primes", "--out", str(tmp_path),
        "--svg", "--csv",
    ])
    assert code == 0
    svg = sorted(tmp_path.glob("variance-profile_*.svg"))
    assert svg and svg[0].read_text().startswith("<svg")


def test_console_script_version():
    out = subprocess.run(
        [sys.executable, "-m", "dirichletlab.cli", "--version"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "0.1.0"
