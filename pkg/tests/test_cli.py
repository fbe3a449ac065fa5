import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from complexscale import cli
from complexscale.cli import dumps_json, export_report, main, run_job
from complexscale.config import SCHEMA, parse_config
from complexscale.errors import ConfigError

WELL = {"kind": "gaussian_well", "depth": 8, "center": 0.8, "width": 0.4, "support_end": 1.8}


def _job(**over):
    d = {"schema": SCHEMA,
         "model": {"kind": "cylinder", "cross_section": {"kind": "explicit", "mus": [0.0]},
                   "grid": {"u_max": 20, "n": 200}},
         "thetas": [0.0], "analyses": ["spectrum"], "ichinose": {"block_n": 16}}
    d.update(over)
    return d


def _write(tmp_path, d, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return str(p)


# --------------------------------------------------------------------------- validation

def test_valid_minimal_config(tmp_path):
    cfg = parse_config(_job(), output_dir=str(tmp_path / "out"))
    assert cfg.model_kind == "cylinder" and cfg.seed == 42
    assert cfg.tolerances["match"] == 1e-4


def test_all_problems_reported_together(tmp_path):
    d = _job(thetas=[[0.1, 0.5], 0.3], analyses=["spectrum", "plots"], colour="red")
    d["model"]["grid"] = {"u_max": 3, "n": 8}
    d["model"]["potential"] = dict(WELL, support_end=2.5)
    d["tolerances"] = {"match": "tight", "bogus": 1}
    d["resolvent"] = {"lambdas": [[0.5, 0.0]]}
    with pytest.raises(ConfigError) as info:
        parse_config(d, output_dir=str(tmp_path))
    text = "\n".join(info.value.problems)
    for needle in ("unknown key 'colour'", "model.grid.n", "support_end", "thetas[0]",
                   "unknown analysis 'plots'", "tolerances: unknown key 'bogus'",
                   "tolerances.match", "lambdas[0]"):
        assert needle in text, needle


def test_schema_and_seed_checked(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(_job(schema="other/9", seed=-1), output_dir=str(tmp_path))
    assert any("schema" in p for p in info.value.problems)
    assert any("seed" in p for p in info.value.problems)


def test_unknown_nested_keys(tmp_path):
    d = _job(resolvent={"path": {"re": 0.5, "wiggle": 1}})
    d["model"]["cross_section"]["extra"] = 1
    with pytest.raises(ConfigError) as info:
        parse_config(d, output_dir=str(tmp_path))
    text = "\n".join(info.value.problems)
    assert "wiggle" in text and "extra" in text


def test_corner_config_parses(tmp_path):
    d = _job(model={"kind": "corner", "cross_section": {"kind": "circle", "n_modes": 1},
                    "grid1": {"u_max": 8, "n": 30}, "grid2": {"u_max": 8, "n": 30},
                    "end_potentials": [WELL, None],
                    "corner_potential": {"depth": 3, "center": [0.6, 0.6], "width": 0.5,
                                         "support_end": 1.8}})
    cfg = parse_config(d, output_dir=str(tmp_path))
    assert cfg.model_kind == "corner"
    assert cfg.model.end_potentials[0].kind == "gaussian_well"


# --------------------------------------------------------------------------- runs

def test_minimal_spectrum_reproduces_stencil(tmp_path):
    d = _job()
    d["model"]["grid"]["bc0"] = "dirichlet"
    d["model"]["grid"]["n"] = 100
    d["model"]["grid"]["u_max"] = 10.1
    cfg = parse_config(d, output_dir=str(tmp_path))
    report = run_job(cfg)
    assert report["summary"]["status"] == "pass"
    export_report(report, tmp_path)
    with open(tmp_path / "spectrum.csv") as fh:
        rows = list(csv.DictReader(fh))
    vals = np.sort([float(r["re"]) for r in rows])
    k = np.arange(1, 101)
    expect = np.sort(4 / 0.1 ** 2 * np.sin(k * np.pi / 202) ** 2)
    assert np.allclose(vals, expect, rtol=1e-9)
    assert all(r["class"] == "ray" for r in rows)


def test_two_theta_resonance_config(tmp_path):
    d = _job(thetas=[[0.4, 0.2], [0.45, 0.1]], analyses=["resonances"])
    d["model"]["grid"] = {"u_max": 20, "n": 400}
    d["model"]["potential"] = WELL
    report = run_job(parse_config(d, output_dir=str(tmp_path)))
    doc = report["documents"]["resonances"]
    assert doc["n_matched"] >= 1
    assert report["summary"]["analyses"]["resonances"]["status"] == "pass"


def test_ichinose_seed_42(tmp_path):
    d = _job(analyses=["ichinose"])
    del d["ichinose"]
    report = run_job(parse_config(d, output_dir=str(tmp_path)))
    doc = report["documents"]["ichinose"]
    assert doc["blocks"]["n"] == 40 and doc["blocks"]["mismatch"] < 1e-7
    assert doc["seed"] == 42 and len(doc["random_pairs"]) == 20
    assert doc["random_worst"] < 1e-8


def test_determinism_and_isolation(tmp_path, monkeypatch):
    cfg = parse_config(_job(analyses=["spectrum", "ichinose"]), output_dir=str(tmp_path))
    a = dumps_json(run_job(cfg)["summary"])
    b = dumps_json(run_job(cfg)["summary"])
    assert a == b

    def broken(cfg, report):
        raise RuntimeError("injected")
    monkeypatch.setitem(cli.RUNNERS, "spectrum", broken)
    report = run_job(cfg)
    res = report["summary"]["analyses"]
    assert res["spectrum"]["status"] == "error" and "injected" in res["spectrum"]["message"]
    assert res["ichinose"]["status"] == "pass"
    assert report["summary"]["status"] == "error"
    # tables keep their fixed layout even when the analysis failed
    assert report["tables"]["spectrum"]["rows"] == []


# --------------------------------------------------------------------------- export

def test_empty_report_header_only(tmp_path):
    report = {"tables": {"spectrum": {"columns": cli.TABLE_COLUMNS["spectrum"], "rows": []}},
              "documents": {}, "summary": {}}
    export_report(report, tmp_path)
    assert (tmp_path / "spectrum.csv").read_bytes() == \
        (",".join(cli.TABLE_COLUMNS["spectrum"]) + "\n").encode()


def test_reexport_byte_identical_and_round_trip(tmp_path):
    cfg = parse_config(_job(analyses=["spectrum", "ichinose"]), output_dir=str(tmp_path))
    report = run_job(cfg)
    first = tmp_path / "a"
    second = tmp_path / "b"
    paths = export_report(report, first)
    export_report(report, second)
    for p in paths:
        name = p.split("/")[-1]
        assert (first / name).read_bytes() == (second / name).read_bytes()
        assert b"\r" not in (first / name).read_bytes()
    doc = json.loads((first / "ichinose.json").read_text())
    orig = report["documents"]["ichinose"]
    assert doc["random_worst"] == orig["random_worst"]
    assert [p["mismatch"] for p in doc["random_pairs"]] == \
        [p["mismatch"] for p in orig["random_pairs"]]
    with open(first / "spectrum.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    assert [float(r[3]) for r in rows] == [r[3] for r in report["tables"]["spectrum"]["rows"]]


def test_dumps_json_format():
    text = dumps_json({"b": [1.0, 0.1], "a": {"z": None, "y": True}, "c": 1 + 2j})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    back = json.loads(text)
    assert back["b"] == [1.0, 0.1] and back["c"] == [1.0, 2.0]


# --------------------------------------------------------------------------- exit codes

def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "out")
    ok = _write(tmp_path, _job(analyses=["ichinose"]))
    assert main(["ichinose", "--config", ok, "--out", out]) == 0
    strict = _write(tmp_path, _job(analyses=["ichinose"],
                                   tolerances={"ichinose_random": 1e-30}), "strict.json")
    assert main(["all", "--config", strict, "--out", out]) == 2
    bad = _write(tmp_path, _job(thetas=[[0.1, 0.5]]), "bad.json")
    assert main(["spectrum", "--config", bad, "--out", out]) == 1
    assert "config error" in capsys.readouterr().err
    assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == 1


def test_seed_override_changes_random_battery(tmp_path):
    cfg_a = parse_config(_job(analyses=["ichinose"]), seed=1, output_dir=str(tmp_path))
    cfg_b = parse_config(_job(analyses=["ichinose"]), seed=2, output_dir=str(tmp_path))
    a = run_job(cfg_a)["documents"]["ichinose"]["random_pairs"]
    b = run_job(cfg_b)["documents"]["ichinose"]["random_pairs"]
    assert a != b


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, _job(analyses=["ichinose"]))
    proc = subprocess.run([sys.executable, "-m", "complexscale.cli", "ichinose", "--config", cfg,
                           "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "ichinose: pass" in proc.stdout
    assert (tmp_path / "o" / "summary.json").exists()
