import csv
import io
import json
import subprocess
import sys

import pytest

from cmcgap import __version__
from cmcgap.cli import main, parse_int_range, parse_real_range, CliUsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ranges():
    assert parse_int_range("4") == [4]
    assert parse_int_range("4..6") == [4, 5, 6]
    assert parse_int_range("4..10:3") == [4, 7, 10]
    assert parse_int_range("6..4") == []
    assert parse_real_range("0.1..2:0.1")[-1] == 2.0
    assert len(parse_real_range("0.1..2:0.1")) == 20
    assert parse_real_range("1.5") == [1.5]
    for bad in ("0.1..2", "a..b", "1..2:0", "1..2:-1"):
        with pytest.raises(CliUsageError):
            (parse_real_range if "." in bad else parse_int_range)(bad)


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants", "--n", "4", "--H", "1", "--c", "1", "--format", "json")
    assert code == 0 and out.endswith("\n")
    doc = json.loads(out)
    assert set(doc) == {"tool_version", "command", "config", "results", "summary"}
    assert doc["tool_version"] == __version__
    rec = doc["results"][0]
    assert rec["alpha"] == pytest.approx(7.61133, abs=1e-5)
    assert rec["delta"] == pytest.approx(0.26667, abs=1e-5)
    assert abs(rec["lemma3_residual"]) < 1e-10
    assert doc["summary"]["failed"] == 0


def test_constants_minimal_and_csv(capsys):
    code, out, _ = run(capsys, "constants", "--n", "4", "--H", "0", "--c", "1", "--format", "json")
    rec = json.loads(out)["results"][0]
    assert rec["alpha"] == 4.0 and rec["delta"] == 0.0
    code, out, _ = run(capsys, "constants", "--n", "4..6", "--H", "1", "--c", "1", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0][:4] == ["n", "H", "c", "alpha"]
    assert len(rows) == 4


def test_twelve_significant_digits(capsys):
    _, out, _ = run(capsys, "constants", "--n", "4", "--H", "1", "--format", "json")
    assert '"alpha": 7.61132983716,' in out


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--n", "4", "--H", "1", "--c", "1", "--S", "7.7")
    assert code == 0 and out.startswith("ForbiddenBand")
    code, out, _ = run(capsys, "classify", "--n", "4", "--H", "1", "--c", "1", "--S", "7.61133", "--format", "json")
    rec = json.loads(out)["results"][0]
    assert rec["tag"] == "RigidBoundary"
    assert rec["model_k"] == 1 and rec["model_lambda"] == pytest.approx(1.54859, abs=1e-5)
    code, _, err = run(capsys, "classify", "--n", "4", "--H", "1", "--c", "1", "--S", "3")
    assert code == 2 and "S >= n H^2" in err
    code, _, err = run(capsys, "classify", "--n", "4", "--H", "0.5", "--c", "-1", "--S", "3")
    assert code == 2 and "H^2 + c > 0" in err


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--n", "4..8", "--H", "0.1..2:0.1", "--c", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 100
    assert all(float(r["problem_margin"]) > 0 for r in rows)
    keys = [(int(r["n"]), float(r["H"])) for r in rows]
    assert keys == sorted(keys)
    code, out, _ = run(capsys, "scan", "--n", "4", "--H", "1", "--c", "1", "--grid", "1000", "--format", "json")
    rec = json.loads(out)["results"][0]
    assert min(rec["band_phi_margin"], rec["band_eta_margin"]) >= -1e-9
    code, out, _ = run(capsys, "scan", "--n", "8..4", "--H", "1", "--format", "csv")
    assert code == 0 and out.count("\n") == 1


def test_verify(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--suite", "lemma3", "--format", "json", "--output", str(path))
    doc = json.loads(path.read_text(encoding="utf-8"))
    assert code == 0
    assert doc["summary"]["failed"] == 0
    assert all(r["passed"] for r in doc["results"])
    code, out, _ = run(capsys, "verify", "--suite", "lemma1", "--n", "4", "--samples", "300", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert all(r["seed"] == 0 and r["samples"] == 303 for r in doc["results"])
    assert doc["summary"]["worst_margin"] >= -1e-9


def test_verify_envelope_text(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "envelope")
    assert code == 0
    assert "PASS  envelope[SMALL_N]" in out and "FAIL" not in out


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "constants", "--n", "x", "--H", "1")[0] == 2
    assert run(capsys, "constants", "--n", "4", "--H", "0.1..1")[0] == 2
    assert run(capsys, "scan", "--n", "4", "--H", "1", "--c", "-5")[0] == 2
    assert run(capsys, "verify", "--samples", "0")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "classify", "--n", "4", "--H", "nan", "--S", "5")[0] == 2


def test_console_entry_point():
    p = subprocess.run(
        [sys.executable, "-m", "cmcgap", "constants", "--n", "4", "--H", "1", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert p.returncode == 0
    assert p.stdout.splitlines()[0].startswith("n,H,c,alpha")
