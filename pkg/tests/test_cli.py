import json
import subprocess
import sys
from pathlib import Path

import pytest

from outerlab.cli import ORDER_KEYS, main, parse_human_orders

INSTANCES = Path(__file__).resolve().parent.parent / "instances"
S3 = str(INSTANCES / "s3_a3_id.hnn")
C8 = str(INSTANCES / "c8_k2_inv.hnn")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_human(capsys):
    code, out, _ = run(capsys, "analyze", S3)
    assert code == 0
    orders = parse_human_orders(out)
    assert orders["outH"] == 12 and orders["out0"] == 6 and orders["outV"] == 6
    assert "index2      = true" in out
    assert "Out_H(G) = Out(G): true" in out


@pytest.mark.parametrize("path", [S3, C8, str(INSTANCES / "c2_trivial_id.hnn"), str(INSTANCES / "s4_a4_id.json")])
def test_json_matches_human(capsys, path):
    _, text, _ = run(capsys, "analyze", path)
    _, js, _ = run(capsys, "analyze", path, "--json")
    doc = json.loads(js)
    assert set(doc["orders"]) == set(ORDER_KEYS)
    assert parse_human_orders(text) == doc["orders"]
    assert doc["thmA"]["equality"] is True


def test_analyze_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", C8, "--json", "--out", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["orders"]["outH"] == 32
    assert doc["witnesses"]["beta"] is not None
    assert doc["outer_table"]["out0_census"] is not None


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", S3, "t h4 T")
    assert code == 0
    assert "reduced:     h4" in out and "normal form: h4" in out
    _, out, _ = run(capsys, "reduce", S3, "h3 t")
    assert "normal form: t h3" in out


def test_reduce_bad_token(capsys):
    code, _, err = run(capsys, "reduce", S3, "x")
    assert code == 2 and "error" in err


def test_verify_and_fault(capsys):
    code, out, _ = run(capsys, "verify", C8)
    assert code == 0 and "all checks passed" in out
    code, out, _ = run(capsys, "verify", C8, "--inject-fault")
    assert code == 1 and "FAIL" in out and "chi_1 kernel" in out


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(INSTANCES / "s3_whole.hnn"))
    assert code == 2 and "mapping-torus" in err
    bad = tmp_path / "bad.hnn"
    bad.write_text("group cayley 0 1; 1 1\nsubgroup trivial\nphi id\n")
    assert run(capsys, "analyze", str(bad))[0] == 2
    assert run(capsys, "analyze", str(tmp_path / "nope.hnn"))[0] == 2


def test_size_cap(capsys, monkeypatch):
    monkeypatch.setenv("OUTERLAB_MAX_ORDER", "4")
    code, _, err = run(capsys, "analyze", S3)
    assert code == 3 and "size cap" in err


def test_corpus_small(capsys):
    code, out, _ = run(capsys, "corpus", "--max-order", "6")
    assert code == 0 and "55" in out
    code, out, _ = run(capsys, "corpus", "--max-order", "4", "--list")
    assert code == 0 and out.strip().endswith("instances")


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "outerlab.cli", "analyze", S3, "--json"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["orders"]["outH"] == 12
