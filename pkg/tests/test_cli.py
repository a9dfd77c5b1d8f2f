import json
import subprocess
import sys

import numpy as np
import pytest

from helidiag import schemas
from helidiag.cli import derive_seed, main, number, parse_kv
from helidiag.fieldio import read_field


def run(*argv):
    try:
        return main([str(a) for a in argv])
    except SystemExit as exc:  # argparse usage errors
        return exc.code


def test_number_and_kv():
    assert number("1/3") == pytest.approx(1 / 3)
    assert number("inf") == float("inf")
    assert parse_kv(["alpha=0.3", "variant=cN"]) == {"alpha": 0.3, "variant": "cN"}
    assert derive_seed(7, "synth") != derive_seed(7, "analyze-besov")
    assert derive_seed(7, "synth") == derive_seed(7, "synth")


def test_synth_is_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert run("synth", "--besov", "alpha=0.333", "variant=cN", "seed=7", "--n", 64,
                   "--out-dir", tmp_path / d, "--name", "synth") == 0
    for suffix in (".fld", ".json"):
        a = (tmp_path / "a" / f"synth{suffix}").read_bytes()
        b = (tmp_path / "b" / f"synth{suffix}").read_bytes()
        assert a == b
    meta = json.loads((tmp_path / "a" / "synth.json").read_text())
    schemas.validate(meta)
    assert read_field(tmp_path / "a" / "synth.fld").grid.n == 64


def test_seed_changes_output(tmp_path):
    run("synth", "--kind", "band-limited", "--n", 32, "--seed", 1, "--out-dir", tmp_path,
        "--name", "one")
    run("synth", "--kind", "band-limited", "--n", 32, "--seed", 2, "--out-dir", tmp_path,
        "--name", "two")
    a, b = read_field(tmp_path / "one.fld"), read_field(tmp_path / "two.fld")
    assert not np.array_equal(a.values, b.values)


def test_empty_report(tmp_path, capsys):
    assert run("report", "--input", tmp_path) == 0
    out = json.loads((tmp_path / "report.json").read_text())
    schemas.validate(out)
    assert {c["verdict"] for c in out["clauses"]} == {"INDETERMINATE"}
    assert "INDETERMINATE" in capsys.readouterr().out


def test_pipeline_to_report(tmp_path):
    d = tmp_path
    assert run("synth", "--besov", "alpha=1/3", "variant=cN", "--n", 128, "--out-dir", d,
               "--name", "v") == 0
    assert run("analyze-besov", "--field", d / "v.fld", "--alpha", "1/3", "--time", 3,
               "--quantity", "grad_theta", "--p", 1.5, "--out-dir", d, "--format", "csv",
               "--name", "v") == 0
    assert (d / "v.profile.csv").read_text().startswith("j,raw,compensated")
    assert run("commutator-scan", "--pair", "alpha=1/3", "beta=1/3", "dim=2", "n=128",
               "--out-dir", d, "--eps0", 0.7, "--ratio", 1.3, "--count", 6) == 0
    assert run("report", "--input", d) == 0
    rep = json.loads((d / "report.json").read_text())
    for path in d.glob("*.json"):
        schemas.validate(json.loads(path.read_text()))
    assert any(c["theorem"] == "sqg" for c in rep["clauses"])


def test_helicity_and_defect_scan(tmp_path):
    d = tmp_path
    assert run("synth", "--kind", "abc", "--dim", 3, "--n", 32, "--out-dir", d, "--name",
               "abc") == 0
    assert run("helicity", "--field", d / "abc.fld", "--out-dir", d, "--name", "abc") == 0
    h = json.loads((d / "abc.helicity.json").read_text())
    assert h["helicity"] == pytest.approx(3 * (2 * np.pi) ** 3, rel=1e-12)
    assert run("synth", "--kind", "band-limited", "--n", 64, "--kmax", 3, "--out-dir", d,
               "--name", "theta") == 0
    assert run("defect-scan", "--system", "sqg", "--field", d / "theta.fld", "--out-dir", d,
               "--eps0", 0.75, "--ratio", 1.2, "--count", 6) == 0
    rep = json.loads((d / "sqg.defects.json").read_text())
    schemas.validate(rep)


def test_run_solver_exports_manifest(tmp_path):
    assert run("run-solver", "--system", "sqg2d", "--init", "band-limited", "--n", 16,
               "--dt", 0.01, "--t-end", 0.05, "--record-every", 1, "--out-dir", tmp_path) == 0
    man = next(tmp_path.rglob("manifest.json"))
    data = json.loads(man.read_text())
    schemas.validate(data)
    assert len(data["files"]) == 6


def test_exit_codes(tmp_path, capsys):
    assert run("synth", "--no-such-flag") == 2
    assert run("helicity", "--field", tmp_path / "missing.fld", "--out-dir", tmp_path) == 2
    bad = tmp_path / "bad.fld"
    bad.write_bytes(b"nonsense")
    assert run("helicity", "--field", bad, "--out-dir", tmp_path) == 2
    err = capsys.readouterr().err
    assert "bad magic" in err
    assert run("run-solver", "--system", "sqg2d", "--init", "band-limited", "--n", 16,
               "--dt", 50, "--t-end", 5000, "--out-dir", tmp_path) == 3
    assert "last finite step" in capsys.readouterr().err


def test_unwritable_out_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run("synth", "--kind", "band-limited", "--n", 16, "--out-dir", blocker / "sub") == 2


def test_config_precedence(tmp_path):
    cfg = tmp_path / "h.ini"
    cfg.write_text(f"[global]\nout-dir = {tmp_path / 'cfg'}\n\n[synth]\nn = 32\n"
                   "kind = band-limited\n")
    assert run("synth", "--config", cfg) == 0
    assert read_field(tmp_path / "cfg" / "field.fld").grid.n == 32
    assert run("synth", "--config", cfg, "--n", 16) == 0  # flags beat the config file
    assert read_field(tmp_path / "cfg" / "field.fld").grid.n == 16


def test_console_script(tmp_path):
    res = subprocess.run([sys.executable, "-m", "helidiag.cli", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0
    for sub in ("synth", "analyze-besov", "commutator-scan", "defect-scan", "helicity",
                "run-solver", "report"):
        assert sub in res.stdout
