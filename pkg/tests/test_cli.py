import csv
import io
import json

import pytest

from w3blocks import __version__
from w3blocks.cli import SCHEMA, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def report(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


def test_header_echoes_config():
    code, d = report("tableaux", "--sigma", "1,1,2,2", "--seed", "3")
    assert code == 0
    assert d["header"]["schema"] == SCHEMA == "w3blocks.report/1"
    assert d["header"]["version"] == __version__
    cfg = d["header"]["config"]
    assert cfg["command"] == "tableaux" and cfg["sigma"] == ["1,1,2,2"] and cfg["seed"] == 3


def test_tableaux_mixed_four():
    _, d = report("tableaux", "--sigma", "1,1,2,2")
    entry = d["result"]["1,1,2,2"]
    assert entry["kostka"] == 2
    assert [t["rows"] for t in entry["tableaux"]] == [[[1, 2], [3, 4], [3, 4]], [[1, 3], [2, 4], [3, 4]]]


def test_tableaux_six_ones():
    _, d = report("tableaux", "--sigma", "1,1,1,1,1,1")
    assert d["result"]["1,1,1,1,1,1"]["kostka"] == 5


def test_divisibility_is_a_usage_error(capsys):
    code, text = call("tableaux", "--sigma", "2,2")
    assert code == 2 and text == ""
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["frobnicate"], ["verify", "--which", "nope"], ["webs"],
                                  ["prob", "--sigma", "1,1,2,2", "--points", "0,1"],
                                  ["prob", "--sigma", "1,1,2,2", "--points", "0,2,1,3"]])
def test_usage_errors(argv, capsys):
    assert call(*argv)[0] == 2


def test_verify_bpz_alternating():
    code, d = report("verify", "--sigma", "1,2,1,2,1,2", "--which", "bpz")
    checks = d["result"]["checks"]
    assert code == 0 and d["passed"]
    assert len(checks) == 36
    assert len({c["tableau"] for c in checks}) == 6
    assert all(c["residual_zero"] and c["numerator_terms"] == 0 for c in checks)
    assert all("wall_time_ms" not in c for c in checks)


def test_timings_are_opt_in():
    _, d = report("verify", "--sigma", "1,1,2,2", "--which", "bpz", "--timings")
    assert all(isinstance(c["wall_time_ms"], (int, float)) for c in d["result"]["checks"])


def test_verify_ward_nonrectangular_marks_expected_failures():
    code, d = report("verify", "--which", "ward", "--nonrectangular")
    assert code == 0
    rows = [c for c in d["result"]["checks"] if c["nonrectangular"]]
    assert rows
    assert all(c["residual_zero"] for c in rows if c["operator"] in ("WI1", "WI2"))
    gates = [c for c in rows if c["operator"] == "WI3-5:any-nonzero"]
    assert gates and all(not c["residual_zero"] and c["passed"] for c in gates)
    assert any(not c["residual_zero"] for c in rows if c["operator"] == "WI4")


def test_covariance_is_deterministic():
    a = call("verify", "--which", "covariance", "--seed", "7")
    b = call("verify", "--which", "covariance", "--seed", "7")
    assert a[0] == 0 and a == b


def test_webs_mixed_four():
    code, d = report("webs", "--sigma", "1,1,2,2")
    assert code == 0
    assert d["result"]["M"] == [[1, 0], [1, 1]]
    # inverse entries are rationals, serialized as strings
    assert d["result"]["M_inv"] == [["1", "0"], ["-1", "1"]]


def test_prob_mixed_four():
    code, d = report("prob", "--sigma", "1,1,2,2", "--tableau", "2", "--points", "0,1,2,3")
    assert code == 0
    assert d["result"]["probabilities"] == {"lambda1": "1/4", "lambda2": "3/4"}


def test_prob_accepts_rationals():
    code, d = report("prob", "--sigma", "1,1,2,2", "--tableau", "2", "--points", "0,1/2,1,2")
    assert code == 0 and d["result"]["sum"] == "1"


def test_dimer_csv():
    code, text = call("dimer", "--sigma", "1,1,2,2", "--sizes", "8,12")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert {r["size"] for r in rows} == {"8", "12"}
    errs = {}
    for r in rows:
        errs.setdefault(r["lambda"], []).append(float(r["rel_err"]))
    assert all(e[1] <= e[0] for e in errs.values())


def test_dimer_three_points():
    code, text = call("dimer", "--sigma", "1,1,1", "--sizes", "8,12")
    assert code == 0 and text.startswith("size,lambda,finite_pr,limit_p,rel_err")


def test_format_from_environment(monkeypatch):
    monkeypatch.setenv("W3BLOCKS_FORMAT", "csv")
    code, text = call("tableaux", "--sigma", "1,1,2,2")
    assert code == 0 and not text.lstrip().startswith("{")
    monkeypatch.setenv("W3BLOCKS_FORMAT", "yaml")
    assert call("tableaux", "--sigma", "1,1,2,2")[0] == 2


def test_text_format_ends_with_verdict():
    code, text = call("tableaux", "--sigma", "1,1,2,2", "--format", "text")
    assert code == 0 and text.strip().splitlines()[-1] == "PASS"


@pytest.mark.parametrize("argv", [["webs", "--sigma", "1,2,1,2,1,2"], ["verify", "--which", "alpha"],
                                  ["verify", "--which", "asymptotics", "--sigma", "1,1,2,2"]])
def test_byte_identical_reruns(argv):
    a, b = call(*argv), call(*argv)
    assert a == b and a[0] == 0
