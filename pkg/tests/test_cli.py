import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from additive_lab import cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def schema():
    return json.loads(resources.files("additive_lab").joinpath("report_schema.json").read_text())


@pytest.mark.parametrize(
    "argv",
    [
        ["sieve", "--x", "1e3,1e4"],
        ["stats", "--g", "bigomega", "--x", "1e4"],
        ["gaps", "--g", "erdos:101", "--x", "2e4"],
        ["interval", "--g", "omega", "--x", "1e5", "--h", "10,100"],
        ["pretentious", "--g", "omega", "--x", "1e4", "--delta", "0.1"],
        ["dualtk", "--seq", "random", "--x", "1e4", "--seed", "3"],
        ["sparse", "--g", "bigomega", "--set", "progression:1:101", "--x", "1e5"],
        ["erdos", "--g", "clog:2", "--x", "1e5"],
    ],
)
def test_json_matches_schema(argv, schema, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, schema)
    assert doc["results"][0]["op"] == argv[0]


def test_json_repeatable(capsys):
    argv = ["stats", "--g", "omega", "--x", "1e5"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_thread_count_does_not_change_output(capsys):
    base = ["gaps", "--g", "bigomega", "--x", "2e5", "--segment-size", "4096"]
    _, a, _ = run(base + ["--threads", "1"], capsys)
    _, b, _ = run(base + ["--threads", "4"], capsys)
    ra, rb = json.loads(a)["results"], json.loads(b)["results"]
    assert ra == rb


def test_csv_columns(capsys):
    code, out, _ = run(["interval", "--g", "bigomega", "--x", "1e5", "--h", "10,100", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2
    assert list(rows[0]) == ["op", "g", "X", "h", "l1", "l2", "bound_l1", "l1_over_B", "l2_over_B2", "trivial_chain"]
    assert [r["h"] for r in rows] == ["10", "100"]
    assert float(rows[0]["l1"]) > float(rows[1]["l1"])


def test_csv_nested_keys(capsys):
    _, out, _ = run(["stats", "--g", "bigomega", "--x", "1e4", "--format", "csv"], capsys)
    cols = next(csv.reader(io.StringIO(out)))
    assert "tail_F.0.1" in cols and "moments.2.0" in cols


@pytest.mark.parametrize(
    "argv",
    [
        ["stats", "--g", "nonsense"],
        ["stats", "--g", "erdos:4"],
        ["interval", "--x", "1e4", "--h", "500"],
        ["sparse", "--set", "progression:0:2", "--x", "1e4"],
        ["stats", "--g", "file:/nonexistent/g.txt"],
        ["sieve", "--x", "abc"],
    ],
)
def test_bad_input_exits_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("error:")


def test_overflow_exits_3(tmp_path, capsys):
    path = tmp_path / "big.txt"
    path.write_text("mode=strong\n2 1e200\n3 1\n")
    code, _, err = run(["stats", "--g", f"file:{path}", "--x", "3"], capsys)
    assert code == 3
    assert "overflow" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for this run\ng = omega\nx = 1e4\nformat = csv\n")
    _, out, _ = run(["stats", "--config", str(cfg)], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["g"] == "omega" and rows[0]["X"] == "10000"
    _, out, _ = run(["stats", "--config", str(cfg), "--x", "2e4", "--format", "json"], capsys)
    assert json.loads(out)["results"][0]["inputs"]["X"] == 20000


def test_config_hash_tracks_inputs(capsys):
    _, a, _ = run(["stats", "--x", "1e4"], capsys)
    _, b, _ = run(["stats", "--x", "2e4"], capsys)
    assert json.loads(a)["meta"]["config_hash"] != json.loads(b)["meta"]["config_hash"]


def test_out_and_plot(tmp_path, capsys):
    target = tmp_path / "interval.json"
    code, out, _ = run(["interval", "--x", "1e5", "--h", "10,100,1000", "--out", str(target), "--plot"], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["results"]
    svg = (tmp_path / "interval.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg


def test_erdos_verdict_line(tmp_path, capsys):
    code, out, err = run(["erdos", "--g", "erdos:101", "--x", "1e5"], capsys)
    assert code == 0
    assert "verdict: hypothesis-failed(decrease-set-density)" in err
    assert json.loads(out)["results"][0]["outputs"]["verdict"] == "hypothesis-failed(decrease-set-density)"
    target = tmp_path / "e.csv"
    _, out, _ = run(["erdos", "--g", "clog:2", "--x", "1e5", "--out", str(target), "--format", "csv"], capsys)
    assert out.strip() == "verdict: consistent-with-c·log"


def test_function_file_via_cli(tmp_path, capsys):
    path = tmp_path / "g.txt"
    path.write_text("mode=complete\n2 1\n3 1\n5 1\n7 1\n")
    code, out, _ = run(["stats", "--g", f"file:{path}", "--x", "10"], capsys)
    assert code == 0
    _, ref, _ = run(["stats", "--g", "bigomega", "--x", "10"], capsys)
    assert json.loads(out)["results"][0]["outputs"] == json.loads(ref)["results"][0]["outputs"]


def test_report_quick(capsys):
    code, out, err = run(["report", "--quick"], capsys)
    assert code == 0
    doc = json.loads(out)
    checks = [r["inputs"]["check"] for r in doc["results"]]
    assert checks == [n for n in range(1, 17) if n not in (3, 8, 9)]
    lines = err.strip().splitlines()
    assert len(lines) == len(checks)
    assert all(line.startswith(("[PASS]", "[FAIL]")) for line in lines)
