import json
import subprocess
import sys

import pytest

from chatelet.cli import main


def run(*args, env=None):
    return subprocess.run([sys.executable, "-m", "chatelet", *args], capture_output=True, text=True, env=env)


def test_classify_iskovskikh():
    out = run("classify", "1", "-2", "-1", "3")
    assert out.returncode == 0
    data = json.loads(out.stdout)
    assert data["verdict"] == "HasseFailure"
    assert data["real_set"] == [1] and data["two_adic_set"] == [-1]
    assert len(data["orbit"]) == 4 and data["stratum"]["beta"] == 1


def test_classify_invalid():
    out = run("classify", "1", "1", "1", "1")
    assert out.returncode == 2 and "determinant is 0" in out.stderr and out.stdout == ""


def test_classify_soluble(capsys):
    assert main(["classify", "1", "1", "1", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "SolubleNoObstruction"


def test_census_height_two(capsys):
    assert main(["census", "--max-norm", "2"]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert row.split(",")[:5] == ["2", "16", "12", "0", "4"]


def test_census_files_and_shard_override(tmp_path, monkeypatch):
    a, b = tmp_path / "a" / "c.csv", tmp_path / "b" / "c.csv"
    assert main(["census", "--max-norm", "60", "--checkpoints", "30,60", "--out", str(a)]) == 0
    monkeypatch.setenv("CHATELET_SHARDS", "8")
    assert main(["census", "--max-norm", "60", "--checkpoints", "30,60", "--shards", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()
    assert len(a.read_text().splitlines()) == 3


@pytest.mark.parametrize("flags", [
    ["--max-norm", "x"],
    ["--max-norm", "10", "--checkpoints", "5,3"],
    ["--max-norm", "10", "--shards", "0"],
    ["--max-norm", "10", "--format", "xml"],
    ["--max-norm", "0"],
])
def test_malformed_flags_write_nothing(tmp_path, flags):
    out = tmp_path / "sub" / "c.csv"
    with pytest.raises(SystemExit) as exc:
        main(["census", *flags, "--out", str(out)])
    assert exc.value.code != 0
    assert not out.parent.exists()


def test_checkpoint_beyond_height(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["census", "--max-norm", "10", "--checkpoints", "5,20", "--out", str(out)]) == 2
    assert not out.exists()


def test_table1_csv(table, tmp_path):
    out = tmp_path / "t.csv"
    assert main(["table1", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "beta_class,gamma_class,delta_class,T,H,Htilde,paper_H,paper_Htilde,match"
    assert len(lines) == 23
    assert "1,0,0,1024,1024,192,1024,192,true" in lines


def test_verify_report(table, tmp_path, capsys):
    out = tmp_path / "v.json"
    code = main(["verify", "--max-norm", "100", "--out", str(out)])
    assert code == 0
    claims = json.loads(out.read_text())
    assert {"claim_id", "paper_value", "computed_value", "verdict"} <= set(claims[0])
    table_rows = [c for c in claims if c["claim_id"].startswith("table1:")]
    assert len(table_rows) == 22
    ctcs = next(c for c in claims if c["claim_id"].startswith("ctcs_family"))
    assert ctcs["verdict"] == "match" and ctcs["computed_value"] == "50/50 HasseFailure"
    tau = next(c for c in claims if c["claim_id"] == "tau_loc2")
    assert tau["paper_value"] == "93/128"
    summary = capsys.readouterr().out
    assert "tau_loc2" in summary and "ctcs_family" in summary
