import csv
import io
import json
import subprocess
import sys

import jsonschema

from cubicdyn.cli import EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, SWEEP_FIELDS, load_schema, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def check(doc, name):
    jsonschema.validate(doc, load_schema(name))


def test_analyze_json_matches_schema(capsys):
    code, out, _ = run(["analyze", "1,1,8:123", "--json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    check(doc, "analysis")
    assert doc["entropy_status"] == "homology_maximal"
    assert doc["verdict"]["kind"] == "realizable"


def test_analyze_no_delta_is_not_an_error(capsys):
    code, out, _ = run(["analyze", "3,3,3:123", "--json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    check(doc, "analysis")
    assert doc["entropy_status"] == "no_delta" and doc["delta"] is None


def test_analyze_degenerate_lists_witnesses(capsys):
    code, out, _ = run(["analyze", "4,4,4:123"], capsys)
    assert code == EXIT_OK
    assert "degenerate" in out and "coincidence" in out


def test_analyze_245_with_map_and_certificate(capsys):
    code, out, _ = run(["analyze", "2,4,5:id", "--with-map", "--certify-real", "--json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    check(doc, "analysis")
    assert len(doc["map"]["fixed_points"]) == 4
    assert doc["certificate"]["all_certified"]


def test_usage_errors(capsys):
    assert run(["analyze", "1,2:id"], capsys)[0] == EXIT_USAGE
    assert run(["sweep"], capsys)[0] == EXIT_USAGE
    assert run(["sweep", "--max-sum", "9", "--sigmas", "foo"], capsys)[0] == EXIT_USAGE
    assert run(["analyze", "1,1,8:123", "--json", "--csv"], capsys)[0] == EXIT_USAGE
    assert run(["figure", "nope"], capsys)[0] == EXIT_USAGE


def test_numeric_failure_exit_code(capsys, monkeypatch):
    import cubicdyn.lefschetz as lf
    monkeypatch.setattr(lf, "real_index_sum", lambda od, n: 1)
    code, out, err = run(["counts", "2,4,5:id", "--certify-real", "--n-max", "8"], capsys)
    assert code == EXIT_NUMERIC and out == "" and "odd sum" in err


def test_sweep_csv_and_json(capsys):
    code, out, _ = run(["sweep", "--max-sum", "11", "--sigmas", "123"], capsys)
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0].keys()) == SWEEP_FIELDS
    assert any(r["orbit_data"] == "1,1,8:123" and r["status"] == "homology_maximal" for r in rows)
    code, out, _ = run(["sweep", "--max-sum", "11", "--sigmas", "123", "--json"], capsys)
    doc = json.loads(out)
    check(doc, "sweep")
    assert len(doc["rows"]) == len(rows)


def test_sweep_parallel_is_deterministic(capsys):
    _, serial, _ = run(["sweep", "--max-sum", "10", "--sigmas", "123,12"], capsys)
    _, par, _ = run(["sweep", "--max-sum", "10", "--sigmas", "123,12", "--parallel", "2"], capsys)
    assert serial == par


def test_tables_json(capsys):
    code, out, _ = run(["tables", "--max-sum", "11", "--json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    check(doc, "tables")
    assert set(doc["audit"]["summary"]) == {"match", "mismatch", "uncovered", "not_realizable"}


def test_counts(capsys):
    code, out, _ = run(["counts", "2,4,5:id", "--n-max", "6", "--json"], capsys)
    doc = json.loads(out)
    check(doc, "counts")
    assert [r["complex_count"] for r in doc["rows"]][:1] == [4]
    code, out, _ = run(["counts", "2,4,5:id", "--certify-real", "--n-max", "40"], capsys)
    lines = out.strip().splitlines()
    assert lines[0] == "n,complex_count,index_sum,fix_plus,fix_minus,certified"
    assert len(lines) == 11 and all(l.endswith("true") for l in lines[1:])


def test_map_commands(capsys):
    code, out, _ = run(["map", "2,4,5:id", "--json"], capsys)
    assert code == EXIT_OK
    check(json.loads(out), "map")
    code, out, _ = run(["map", "2,4,5:id", "--csv"], capsys)
    assert len(out.strip().splitlines()) == 5
    code, out, _ = run(["map", "2,4,5:id", "--iterate", "0.5", "--steps", "3", "--csv"], capsys)
    assert out.splitlines()[0] == "step,x,y,z" and len(out.strip().splitlines()) == 5


def test_figure(capsys):
    code, out, _ = run(["figure", "multiplier-vs-n", "--n-max", "8", "--json"], capsys)
    assert code == EXIT_OK
    doc = json.loads(out)
    check(doc, "figure")
    assert [r["n"] for r in doc["rows"]] == [4, 5, 6, 7, 8]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cubicdyn.cli", "analyze", "1,1,8:123"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "1.17628081825991750654407033847" in proc.stdout
