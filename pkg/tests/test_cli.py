from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from wreath_approx.certify import check_bounds
from wreath_approx.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cfg(name):
    return str(CONFIGS / name)


def test_folner_z_prints_size(capsys, tmp_path):
    out = tmp_path / "f.json"
    assert main(["folner", cfg("folner_z.json"), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["size"] == 240 and doc["bound"] == "1/60"
    assert "240 elements" in capsys.readouterr().out


@pytest.mark.parametrize("name, cmd", [
    ("sofic.json", "lift"),
    ("weakly_sofic.json", "lift"),
    ("linear_sofic.json", "lift"),
    ("linear_sofic_block.json", "lift"),
    ("hyperlinear.json", "lift"),
    ("coamenable_sym6.json", "coamenable"),
    ("coamenable_z6.json", "coamenable"),
    ("coamenable_fsym.json", "coamenable"),
])
def test_configs_pass(name, cmd, tmp_path, capsys):
    out = tmp_path / "cert.json"
    assert main([cmd, cfg(name), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["pass"] is True and doc["failures"] == []
    assert "PASS" in capsys.readouterr().out


def test_weakly_sofic_targets_wreath(tmp_path):
    out = tmp_path / "c.json"
    main(["lift", cfg("weakly_sofic.json"), "--out", str(out)])
    assert json.loads(out.read_text())["extra"]["target"] == "wreath"


def test_hyperlinear_reports_trace_and_orthogonality(tmp_path):
    out = tmp_path / "c.json"
    main(["lift", cfg("hyperlinear.json"), "--out", str(out)])
    doc = json.loads(out.read_text())
    assert doc["measured_trace_max"] <= 0.5
    lo, hi = doc["orthogonality"]
    assert lo <= hi and lo >= (2 - 2 * 0.5) ** 0.5 - 1e-9


def test_certificate_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["lift", cfg("sofic.json"), "--seed", "7", "--out", str(a)])
    main(["lift", cfg("sofic.json"), "--seed", "7", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    c, d = tmp_path / "c.json", tmp_path / "d.json"
    main(["coamenable", cfg("coamenable_sym6.json"), "--out", str(c)])
    main(["coamenable", cfg("coamenable_sym6.json"), "--out", str(d)])
    assert c.read_bytes() == d.read_bytes()


def test_stdout_certificate_without_out(capsys):
    assert main(["lift", cfg("sofic.json")]) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["pass"] is True
    assert "PASS" in captured.err


def test_epsilon_override(tmp_path):
    out = tmp_path / "c.json"
    assert main(["lift", cfg("sofic.json"), "--epsilon", "1/3", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["epsilon"] == "1/3"


def test_certificate_failure_exit_one(tmp_path, monkeypatch):
    import wreath_approx.cli as cli
    from wreath_approx.pipelines import run_lift

    def forged(config):
        cert = run_lift(config)
        cert.measured_defect = cert.theoretical_defect_bound
        return check_bounds(cert)

    monkeypatch.setattr(cli, "run_lift", forged)
    out = tmp_path / "c.json"
    assert main(["lift", cfg("sofic.json"), "--out", str(out)]) == 1
    doc = json.loads(out.read_text())
    assert doc["pass"] is False and "defect" in doc["failures"][0]


@pytest.mark.parametrize("doc", [
    "not json",
    json.dumps([1, 2]),
    json.dumps({"class": "sofic", "G": {"kind": "nope"}, "H": {"kind": "Z"}, "F": [], "epsilon": "1/2"}),
    json.dumps({"class": "sofic", "G": {"kind": "cyclic", "n": 2}, "H": {"kind": "Z"}, "F": [], "epsilon": "3/2"}),
    json.dumps({"class": "sofic", "G": {"kind": "cyclic", "n": 2}, "H": {"kind": "Z"}, "F": [], "epsilon": 0.5}),
    json.dumps({"class": "bogus", "G": {"kind": "cyclic", "n": 2}, "H": {"kind": "Z"}, "F": [], "epsilon": "1/2"}),
])
def test_config_errors_exit_two(doc, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(doc)
    assert main(["lift", str(p)]) == 2


def test_bad_subgroup_exit_two(tmp_path):
    doc = json.loads(Path(cfg("coamenable_z6.json")).read_text())
    doc["subgroup"]["elements"] = [0, 2, 3]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    assert main(["coamenable", str(p)]) == 2


def test_missing_file_and_bad_args_exit_two(tmp_path):
    assert main(["lift", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["lift"])
    assert exc.value.code == 2


@pytest.mark.parametrize("doc", [
    {"class": "hyperlinear", "G": {"kind": "cyclic", "n": 2}, "approx": "cayley", "H": {"kind": "Z"},
     "F": [{"support": [], "h": 1}], "epsilon": "1/2"},
    {"class": "sofic", "G": {"kind": "cyclic", "n": 2}, "H": {"kind": "Z"},
     "F": [{"support": [], "h": 100000000}], "epsilon": "1/1000000"},
])
def test_construction_error_exit_three(doc, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(doc))
    assert main(["lift", str(p)]) == 3


def test_props_subcommand(tmp_path, capsys):
    out = tmp_path / "props.txt"
    assert main(["props", "--seed", "1", "--sizes", "1,2", "--pairs", "50", "--out", str(out)]) == 0
    assert out.read_text().count("PASS") == 15
    assert main(["props", "--sizes", "9"]) == 2


def test_console_script_module_entry(tmp_path):
    r = subprocess.run([sys.executable, "-m", "wreath_approx.cli", "folner", cfg("folner_z.json")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "240" in r.stdout
