import json
import subprocess
import sys

import numpy as np
import pytest

from lelmbell import cli
from lelmbell.report import RunReport, jsonable


def test_classify_four(capsys):
    assert cli.main(["classify", "--k", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["summary"]["counts"] == {"loser": 54, "winner": 72}
    assert set(out) == {"version", "command", "config", "results", "summary", "timings"}


def test_classify_six(capsys):
    assert cli.main(["classify", "--k", "6"]) == 0
    assert json.loads(capsys.readouterr().out)["summary"]["counts"] == {"anti-loser": 72, "anti-winner": 12}


@pytest.mark.parametrize("argv", [["classify", "--k", "3"], ["classify", "--d", "2"], ["search", "--k", "0"],
                                  ["search", "--restarts", "0"], ["nogo", "--statistics", "fermion"]])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_bad_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["nogo", "--chain", "nonsense"])
    assert exc.value.code == 2


def test_search_pairs(capsys):
    assert cli.main(["search", "--k", "2", "--restarts", "10"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["summary"]["statuses"] == {"instance-found": 36}
    w = out["results"][0]["witness"]
    assert len(w) == 6 and all(len(pair) == 2 for pair in w)


def test_csv_format(capsys):
    assert cli.main(["classify", "--k", "6", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("kind,set,class")
    assert len(lines) == 85


def test_verification_failure_exit(monkeypatch, capsys):
    real = cli.povm.qubit_povm_nogo

    def broken(statistics, restarts, seed):
        cert = real(statistics, restarts=restarts, seed=seed, numeric=False)
        cert.status = "verification-failed"
        cert.steps[-1]["verified"] = False
        return cert

    monkeypatch.setattr(cli.povm, "qubit_povm_nogo", broken)
    assert cli.main(["nogo", "--chain", "povm-qubit"]) == 1
    err = capsys.readouterr().err
    assert "FAILED: povm-qubit/boson: alpha3=0" in err


def test_povm_qubit_bound():
    report, code = cli.run(["nogo", "--chain", "povm-qubit", "--restarts", "20"])
    assert code == 0
    assert report.summary["bound"]["max_distinguishable"] == 3
    assert report.summary["bound"]["of"] == 4


def test_coverage_chain():
    report, code = cli.run(["nogo", "--chain", "six-set-coverage"])
    assert code == 0 and report.summary["coverage"] == {"covered": 84, "total": 84}


def test_round_trip():
    report, _ = cli.run(["search", "--k", "2", "--restarts", "3"])
    text = report.to_json()
    back = RunReport.from_json(text)
    assert back == RunReport.from_dict(report.to_dict())
    assert back.to_json() == text


def test_float_precision_preserved():
    x = 0.1 + 0.2
    r = RunReport("t", {"x": x}, [{"v": 1 / 3, "z": 1 / 7 + 2j}])
    back = RunReport.from_json(r.to_json())
    assert back.config["x"] == x
    assert back.results[0]["v"] == 1 / 3
    assert back.results[0]["z"] == [1 / 7, 2.0]


def test_jsonable():
    assert jsonable(np.array([1 + 2j])) == [[1.0, 2.0]]
    assert jsonable({"a": np.float64(0.5), "b": np.int64(3), "c": np.bool_(True)}) == {"a": 0.5, "b": 3, "c": True}


def test_reproducible_results():
    a, _ = cli.run(["search", "--k", "3", "--restarts", "5", "--seed", "7"])
    b, _ = cli.run(["search", "--k", "3", "--restarts", "5", "--seed", "7"])
    assert a.to_dict()["results"] == b.to_dict()["results"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lelmbell", "classify", "--k", "4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["summary"]["total"] == 126
    assert "loser" in proc.stderr
