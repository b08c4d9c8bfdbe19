import json

import pytest

from artifact.cli import EXIT_CONFIG, EXIT_PASS, EXIT_VIOLATION, main
from artifact.conventions import ledger_hash


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_rep_verify_b2(capsys):
    code, out = run(capsys, "rep", "verify", "--kind", "B", "--rank", "2")
    assert code == EXIT_PASS and out["result"]["violations"] == []
    assert out["ledger_hash"] == ledger_hash() and out["backend"] and out["checks"]
    assert "runtime_s" in out["metadata"]


def test_rmatrix_ybe_sample(capsys):
    code, out = run(capsys, "rmatrix", "ybe", "--kind", "B", "--rank", "2", "--sample", "2/3,5,7")
    assert code == EXIT_PASS and out["result"]["max_residual"] == ["0"]


def test_fock_oracle_compare(capsys):
    code, out = run(capsys, "fock", "oracle-compare", "--kind", "D", "--rank", "3", "--type", "half",
                    "--max-degree", "3")
    assert code == EXIT_PASS
    assert [r["fock"] for r in out["result"]["table"]] == [1, 6, 15, 26, 51, 102, 172]


def test_config_errors_exit_2(capsys):
    code, out = run(capsys, "rep", "verify", "--kind", "D", "--rank", "2")
    assert code == EXIT_CONFIG and out["error"]["type"] == "config"
    code, _ = run(capsys, "rmatrix", "ybe", "--kind", "B", "--rank", "2", "--sample", "1,2")
    assert code == EXIT_CONFIG
    with pytest.raises(SystemExit) as e:
        main(["rep", "verify", "--kind", "E", "--rank", "6"])
    assert e.value.code == 2


def test_failed_check_exits_1(capsys):
    code, out = run(capsys, "spinor", "exchange", "--kind", "D", "--rank", "3", "--max-degree", "1",
                    "--fock-degree", "0", "--trials", "1")
    assert code == EXIT_VIOLATION and out["ok"] is False


def test_outputs_are_reproducible(capsys, tmp_path):
    argv = ["series", "double-swap", "--kind", "B", "--rank", "2", "--order", "3"]
    outs = []
    for k in range(2):
        path = tmp_path / f"o{k}.json"
        assert main(argv + ["--output", str(path)]) == EXIT_PASS
        d = json.loads(path.read_text())
        d.pop("metadata")
        outs.append(json.dumps(d, sort_keys=True))
    capsys.readouterr()
    assert outs[0] == outs[1]


def test_cache_dir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ARTIFACT_CACHE_DIR", str(tmp_path))
    code, _ = run(capsys, "fock", "dims", "--kind", "D", "--rank", "3", "--max-degree", "1", "--trials", "1")
    assert code == EXIT_PASS and list(tmp_path.glob("fock_*.pkl"))
