import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from wreathlab.cli import main, to_json
from wreathlab.core import Partition


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_cycle_index_wreath_example():
    code, out = run("cycle-index", "wreath", "--gamma", "C2", "--n", "2")
    assert code == 0
    data = json.loads(out)
    assert data["degree"] == 4
    got = {tuple(sorted((int(i), e) for i, e in t["exponents"].items())): Fraction(int(t["num"]), int(t["den"]))
           for t in data["terms"]}
    assert got == {((1, 4),): Fraction(1, 8), ((1, 2), (2, 1)): Fraction(1, 4),
                   ((2, 2),): Fraction(3, 8), ((4, 1),): Fraction(1, 4)}


def test_cycle_index_product_text():
    code, out = run("cycle-index", "product", "--a", "S2", "--b", "S3", "--format", "text")
    assert code == 0
    assert "1/12*x1^6" in out and "1/6*x6" in out


def test_sample_type_example():
    code, out = run("sample", "type", "--gamma", "S3", "--n", "1000", "--count", "5", "--seed", "7")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5
    assert all(Partition.parse(line).weight == 3000 for line in lines)


def test_chain_matrix_csv():
    code, out = run("chain", "matrix", "--n", "5", "--format", "csv")
    assert code == 0
    rows = [r.split(",") for r in out.strip().splitlines()]
    assert len(rows) == 8 and all(len(r) == 8 for r in rows)
    labels = rows[0][1:]
    assert labels == [r[0] for r in rows[1:]]
    m = {(a, b): Fraction(v) for a, r in zip(labels, rows[1:]) for b, v in zip(labels, r[1:])}
    assert m[("1^5", "1^5")] == Fraction(1, 120)
    assert m[("5", "5")] == Fraction(4, 5)
    assert all(sum(m[(a, b)] for b in labels) == 1 for a in labels)


@pytest.mark.parametrize("argv", [
    ["sample", "type", "--gamma", "S3", "--n", "40", "--count", "200"],
    ["sample", "counts", "--gamma", "C3", "--n", "30", "--count", "100", "--format", "csv"],
    ["limit", "sample", "--family", "s3", "--trunc-B", "4", "--count", "50"],
    ["chain", "run", "--n", "5", "--steps", "300"],
    ["verify", "tv", "--gamma", "S2", "--n", "20", "--count", "5000"],
])
def test_repeat_is_byte_identical(argv):
    assert run(*argv) == run(*argv)


def test_threads_do_not_change_output():
    # more than one chunk, so the threaded path really splits work
    base = ["sample", "counts", "--gamma", "S3", "--n", "30", "--trunc-B", "3", "--count", "140000", "--format", "csv"]
    one = run(*base, "--threads", "1")
    four = run(*base, "--threads", "4")
    assert one[0] == 0 and one == four


def test_seed_changes_output():
    base = ["sample", "type", "--gamma", "S3", "--n", "40", "--count", "20"]
    assert run(*base, "--seed", "1") != run(*base, "--seed", "2")


def test_formats():
    base = ["limit", "sample", "--family", "gamma", "--gamma", "S3", "--trunc-B", "3", "--count", "4", "--seed", "3"]
    _, js = run(*base, "--format", "json")
    _, csv = run(*base, "--format", "csv")
    _, text = run(*base, "--format", "text")
    rows = json.loads(js)
    rows = rows["samples"] if isinstance(rows, dict) else rows
    csv_rows = [list(map(int, r.split(","))) for r in csv.strip().splitlines()[1:]]
    assert csv_rows == [list(r) for r in rows]
    assert len(text.strip().splitlines()) == 4


def test_float_and_fraction_rendering():
    assert to_json(0.1) == "0.10000000000000001"
    assert to_json(Fraction(3, 8)) == '"3/8"'
    assert to_json({"a": [1, None, True]}) == '{"a": [1, null, true]}'


def test_explicit_group_file(tmp_path):
    path = tmp_path / "c3.json"
    path.write_text(json.dumps({"degree": 3, "elements": ["()", "(1 2 3)", "(1 3 2)"]}))
    a = run("cycle-index", "wreath", "--gamma", f"@{path}", "--n", "2")
    b = run("cycle-index", "wreath", "--gamma", "C3", "--n", "2")
    assert a[0] == 0 and json.loads(a[1])["terms"] == json.loads(b[1])["terms"]


def test_verify_triangle_and_cyclic():
    code, out = run("verify", "triangle", "--gamma", "C2", "--n", "3")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out = run("verify", "cyclic", "--k-max", "8")
    data = json.loads(out)
    assert data["all_match"] is True
    assert {"p": 2, "a": 2, "printed": "5", "enumerated": "11/2"} in data["printed_second_moment_mismatches"]


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["sample", "type", "--n", "5", "--nope"],
    ["sample", "type", "--gamma", "X3", "--n", "5"],
    ["sample", "type", "--n", "5", "--seed", "-1"],
    ["sample", "type", "--n", "5", "--threads", "0"],
    ["cycle-index", "wreath", "--gamma", "@/nonexistent.json", "--n", "2"],
])
def test_validation_errors_exit_1(argv, capsys):
    assert run(*argv)[0] == 1
    assert "error" in capsys.readouterr().err


def test_cap_exceeded_exit_2(capsys):
    assert run("verify", "census", "--gamma", "C2", "--n", "3", "--cap", "10")[0] == 2
    assert "cap" in capsys.readouterr().err


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("WREATHLAB_CAP", "10")
    assert run("verify", "census", "--gamma", "C2", "--n", "3")[0] == 2
    monkeypatch.setenv("WREATHLAB_CAP", "100")
    assert run("verify", "census", "--gamma", "C2", "--n", "3")[0] == 0


def test_cap_flag_does_not_leak(monkeypatch):
    monkeypatch.delenv("WREATHLAB_CAP", raising=False)
    run("verify", "census", "--gamma", "C2", "--n", "3", "--cap", "10")
    assert run("verify", "census", "--gamma", "C2", "--n", "3")[0] == 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "wreathlab", "stats", "descents", "--perm", "3 1 2"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and json.loads(r.stdout) == {"descents": 1}
    r = subprocess.run([sys.executable, "-m", "wreathlab", "nope"], capture_output=True, text=True, check=False)
    assert r.returncode == 1 and "usage" in r.stderr
