import json
from fractions import Fraction
from pathlib import Path

import pytest

from fraccover.cli import RunConfig, UsageError, main, run
from fraccover.fhw import TreeDecomposition, td_fractional_width, validate_td
from fraccover.hypergraph import load, parse

DATA = Path(__file__).resolve().parent.parent / "data"
H4 = str(DATA / "h4.hg")
TRIANGLE = str(DATA / "triangle.hg")
SINGLE = str(DATA / "single.hg")


def run_json(capsys, *argv):
    status = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return status, json.loads(out), out


def test_cover_h4(capsys):
    status, rep, _ = run_json(capsys, "cover", H4)
    assert status == 0
    assert rep["weight"] == "7/4" and rep["support_size"] == 5
    assert Fraction(rep["weights"]["e0"]) == Fraction(3, 4)


def test_cover_vertex_subset(capsys):
    status, rep, _ = run_json(capsys, "cover", H4, "--vertices", "v0")
    assert status == 0 and rep["weight"] == "1" and rep["vertices"] == ["v0"]


def test_vcover_triangle(capsys):
    status, rep, _ = run_json(capsys, "vcover", TRIANGLE)
    assert status == 0 and rep["weight"] == "3/2"


def test_analyze(capsys):
    status, rep, _ = run_json(capsys, "analyze", H4, "--c", "2", "--d", "0")
    assert status == 0
    assert [p["d"] for p in rep["profiles"]] == [4, 1, 1, 1]
    assert rep["is_cd"]["holds"] is False and len(rep["is_cd"]["witness"]) == 2
    assert rep["reduced"] is True


def test_dual_text(capsys, tmp_path):
    assert main(["dual", H4]) == 0
    text = capsys.readouterr().out
    dual = parse(text)
    assert dual.edges["d_v0"] == {"e1", "e2", "e3", "e4"}
    src = tmp_path / "p.hg"
    src.write_text("e(a,b).\nf(c).\n")
    assert main(["dual", str(src)]) == 1
    capsys.readouterr()
    assert main(["dual", str(src), "--reduce"]) == 0


def test_reduce_h4(capsys, tmp_path):
    trace_path = tmp_path / "trace.json"
    status, rep, _ = run_json(capsys, "reduce", H4, "--c", "2", "--k", "2", "--trace", str(trace_path))
    assert status == 0
    assert Fraction(rep["result"]["weight"]) <= 2
    assert rep["coverage_superset"] and rep["weight_within_k"] and rep["trace_valid"]
    assert rep["support_within_final_n"]
    steps = json.loads(trace_path.read_text())
    assert steps[-1]["kind"] == "certify" and steps[-1]["perfect"]


def test_reduce_with_weights_file_and_dual(capsys, tmp_path):
    w = tmp_path / "w.json"
    w.write_text(json.dumps({"weights": {"e0": "1/2", "e1": "1/2", "e2": "1/2"}}))
    status, rep, _ = run_json(capsys, "reduce", H4, "--c", "2", "--weights", str(w), "--trace", "-")
    assert status == 0 and rep["k"] == "2" and isinstance(rep["trace"], list)
    status, rep, _ = run_json(capsys, "reduce", TRIANGLE, "--c", "3", "--dual")
    assert status == 0 and rep["mode"] == "vertex" and rep["coverage_superset"]


def test_reduce_cap_exceeded(capsys):
    assert main(["reduce", H4, "--c", "2", "--k", "2", "--cap", "0"]) == 1
    assert "cap" in capsys.readouterr().err


def test_reduce_cap_from_env(capsys, monkeypatch):
    monkeypatch.setenv("FRACCOVER_CAP", "0")
    assert main(["reduce", H4, "--c", "2", "--k", "2"]) == 1


def test_fhw_negative(capsys):
    status, rep, _ = run_json(capsys, "fhw", TRIANGLE, "--k", "1", "--q", "3")
    assert status == 2 and rep["message"] == "no TD within budget"


def test_fhw_positive_td_revalidates(capsys):
    status, rep, _ = run_json(capsys, "fhw", H4, "--k", "7/4", "--q", "5", "--brute")
    assert status == 0 and rep["brute"]["found"]
    h = load(H4)
    td = TreeDecomposition.from_json(rep["decomposition"])
    assert validate_td(h, td) == (True, None)
    assert td_fractional_width(h, td) == Fraction(rep["decomposition"]["width"]) <= Fraction(7, 4)


def test_fhw_deepen(capsys):
    status, rep, _ = run_json(capsys, "fhw", TRIANGLE, "--k", "3/2", "--deepen")
    assert status == 0
    assert [lvl["q"] for lvl in rep["levels"]] == [1, 2, 3]
    assert [lvl["found"] for lvl in rep["levels"]] == [False, False, True]


def test_fhw_text_output(capsys):
    assert main(["fhw", SINGLE, "--k", "1", "--q", "1"]) == 0
    out = capsys.readouterr().out
    assert "width: 1" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["cover", H4],
        ["vcover", H4],
        ["analyze", H4],
        ["reduce", H4, "--c", "2", "--trace", "-"],
        ["fhw", H4, "--k", "2", "--deepen"],
        ["dual", H4],
    ],
)
def test_json_is_byte_identical(capsys, argv):
    _, _, a = run_json(capsys, *argv)
    _, _, b = run_json(capsys, *argv)
    assert a == b


def test_rationals_roundtrip(capsys):
    _, rep, _ = run_json(capsys, "reduce", H4, "--c", "2")
    for key in ("input", "result"):
        data = rep[key]
        total = sum((Fraction(v) for v in data["weights"].values()), Fraction(0))
        assert total == Fraction(data["weight"])
        assert all("." not in v for v in data["weights"].values())


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["fhw", H4, "--k", "1.5", "--q", "1"], "parameter error"),
        (["fhw", H4, "--k", "-1", "--q", "1"], "parameter error"),
        (["fhw", H4, "--k", "1"], "parameter error"),
        (["reduce", H4, "--c", "0"], "parameter error"),
        (["cover", "/nonexistent.hg"], "error"),
    ],
)
def test_errors_exit_one(capsys, argv, fragment):
    assert main(argv) == 1
    assert fragment in capsys.readouterr().err


def test_parse_error_message(capsys, tmp_path):
    bad = tmp_path / "bad.hg"
    bad.write_text("e0(a).\ne1().\n")
    assert main(["cover", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "parse error" in err and "2" in err


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("nope", H4)
    with pytest.raises(UsageError):
        RunConfig("fhw", H4, q=0)
    with pytest.raises(UsageError):
        RunConfig("cover", H4, output="xml")
    status, rep = run(RunConfig("cover", H4))
    assert status == 0 and rep["weight"] == "7/4"
