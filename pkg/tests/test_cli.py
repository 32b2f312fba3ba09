"""Command-line interface: subcommands, report shape, exit codes."""

import io
import json
import shutil
import subprocess
import sys

import pytest

from flagsos import bundled_certificate, save_certificate
from flagsos.cli import main


def run_cli(*argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    old_out, old_err, old_in = sys.stdout, sys.stderr, sys.stdin
    sys.stdout, sys.stderr = out, err
    if stdin is not None:
        sys.stdin = io.StringIO(stdin)
    try:
        code = main(list(argv))
    finally:
        sys.stdout, sys.stderr, sys.stdin = old_out, old_err, old_in
    return code, out.getvalue(), err.getvalue()


def json_out(*argv, **kw):
    code, out, err = run_cli(*argv, **kw)
    assert code == 0, err
    return json.loads(out)


class TestReportShape:
    def test_common_fields(self):
        obj = json_out("enumerate", "4")
        assert obj["subcommand"] == "enumerate"
        assert set(obj) == {
            "subcommand",
            "inputs",
            "outputs",
            "timing_ms",
            "engine_version",
            "certificate_sha256",
        }
        assert len(obj["certificate_sha256"]) == 64

    def test_deterministic_modulo_timing(self):
        a = json_out("extremal", "7", "--workers", "1")
        b = json_out("extremal", "7", "--workers", "3")
        a.pop("timing_ms")
        b.pop("timing_ms")
        assert a == b


class TestVerify:
    def test_bundled_passes(self):
        obj = json_out("verify")
        out = obj["outputs"]
        assert out["passed"] is True
        assert out["derived_bound"] == "24/625"
        assert out["psd_ok"] is True
        assert out["coefficients"]["DLo"] == "2400"
        assert out["coefficients"]["DBg"] == "-24073/20"

    def test_explicit_certificate_path(self, tmp_path):
        p = tmp_path / "cert.json"
        p.write_bytes(save_certificate(bundled_certificate()))
        obj = json_out("verify", "--certificate", str(p))
        assert obj["outputs"]["passed"] is True

    def test_failing_certificate_exits_1(self, tmp_path):
        raw = json.loads(save_certificate(bundled_certificate()))
        raw["bound"] = "2399"
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(raw))
        code, out, _ = run_cli("verify", "--certificate", str(p))
        assert code == 1
        assert json.loads(out)["outputs"]["passed"] is False

    def test_missing_file_exits_2(self):
        code, out, err = run_cli("verify", "--certificate", "/nonexistent.json")
        assert code == 2
        assert not out
        assert "error" in json.loads(err)

    def test_corrupt_file_exits_2(self, tmp_path):
        p = tmp_path / "junk.json"
        p.write_text("{not json")
        code, _, err = run_cli("verify", "--certificate", str(p))
        assert code == 2
        assert "malformed" in json.loads(err)["error"]


class TestEnumerate:
    def test_counts(self):
        obj = json_out("enumerate", "6")
        assert obj["outputs"]["count"] == 38
        assert len(obj["outputs"]["models"]) == 38

    def test_out_of_range_exits_2(self):
        code, _, err = run_cli("enumerate", "99")
        assert code == 2
        assert "error" in json.loads(err)


class TestPentagons:
    def test_from_args(self):
        obj = json_out("pentagons", "GhdHKc", "Dhc")
        results = obj["outputs"]["results"]
        assert [r["pentagons"] for r in results] == [8, 1]

    def test_from_stdin(self):
        obj = json_out("pentagons", stdin="GhdHKc Dhc\n")
        results = obj["outputs"]["results"]
        assert [r["pentagons"] for r in results] == [8, 1]

    def test_triangle_input_exits_2(self):
        code, _, err = run_cli("pentagons", "Bw")
        assert code == 2
        assert "triangle" in json.loads(err)["error"]


class TestBlowup:
    def test_pentagon_blowup(self):
        obj = json_out("blowup", "Dhc:2,2,2,2,2")
        out = obj["outputs"]
        assert out["n"] == 10
        assert out["pentagons"] == 32
        assert out["parts"] == [2, 2, 2, 2, 2]

    def test_malformed_spec_exits_2(self):
        for bad in ["Dhc", "Dhc:2,2", "Dhc:0,1,1,1,1", "Dhc:a,b,c,d,e"]:
            code, _, err = run_cli("blowup", bad)
            assert code == 2, bad
            assert "error" in json.loads(err)


class TestCutnorm:
    def test_single_graph(self):
        obj = json_out("cutnorm", "Dhc")
        out = obj["outputs"]
        assert out["cut_norm"] == "2/5"
        assert set(out) >= {"S", "T", "cut_norm"}

    def test_pair(self):
        obj = json_out("cutnorm", "Dhc", "D??")
        assert obj["outputs"]["cut_norm"] == "2/5"

    def test_size_mismatch_exits_2(self):
        code, _, err = run_cli("cutnorm", "Dhc", "C~")
        assert code == 2


class TestDensity:
    def test_density(self):
        obj = json_out("density", "BW", "Dhc")
        assert obj["outputs"]["density"] == "1/2"

    def test_exactly_two_graphs(self):
        code, _, err = run_cli("density", "BW")
        assert code == 2
        assert "exactly two" in json.loads(err)["error"]


class TestExtremal:
    def test_level8(self):
        obj = json_out("extremal", "8", "--workers", "2")
        out = obj["outputs"]
        assert out["max_pentagons"] == 8
        assert out["sporadic_present"] is True
        assert len(out["extremal"]) == 3


class TestOutputModes:
    def test_tsv(self):
        code, out, _ = run_cli("cutnorm", "Dhc", "--output", "tsv")
        assert code == 0
        rows = dict(
            line.split("\t", 1) for line in out.strip().splitlines()
        )
        assert rows["outputs.cut_norm"] == "2/5"

    def test_global_flag_position(self):
        a = json_out("--output", "json", "cutnorm", "Dhc")
        b = json_out("cutnorm", "Dhc", "--output", "json")
        a.pop("timing_ms")
        b.pop("timing_ms")
        assert a == b


class TestEntryPoints:
    def test_python_dash_m(self):
        proc = subprocess.run(
            [sys.executable, "-m", "flagsos.cli", "enumerate", "3"],
            capture_output=True,
            text=True,
            timeout=300,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["outputs"]["count"] == 3

    def test_console_script(self):
        exe = shutil.which("flagsos")
        if exe is None:
            pytest.skip("console script not on PATH")
        proc = subprocess.run(
            [exe, "pentagons", "GhdHKc"],
            capture_output=True,
            text=True,
            timeout=300,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["outputs"]["results"][0]["pentagons"] == 8
