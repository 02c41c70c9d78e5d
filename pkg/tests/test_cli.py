import csv
import io
import json
import math
import subprocess
import sys

import pytest

from parcomp.cli import EXIT_CONFIG, EXIT_MATH, EXIT_OK, EXIT_VALIDATION, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_expand_exponential(capsys):
    code, out, _ = run(capsys, "expand", "--family", "exp1d", "--theta", "-1")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert out.splitlines()[0].split(",")[0] == "schema_version"
    assert row["schema_version"] == "1"
    assert float(row["F0"]) == 1.0
    assert float(row["F1"]) == pytest.approx(-1 / 12, abs=1e-11)
    assert float(row["F2"]) == pytest.approx(1 / 288, abs=1e-11)
    assert row["cramer_ok"] == "true"


def test_expand_many_points_and_families(capsys):
    code, out, _ = run(capsys, "expand", "--family", "normal-kv", "--dim", "2",
                       "--theta", "0.1,0.2", "--theta=-1,3")
    assert code == EXIT_OK
    assert [(float(r["F1"]), float(r["F2"])) for r in rows(out)] == [(0.0, 0.0), (0.0, 0.0)]
    code, out, _ = run(capsys, "expand", "--family", "spherical", "--dim", "3", "--order", "1")
    assert code == EXIT_OK
    assert float(rows(out)[0]["F1"]) == pytest.approx(-13 / 12, abs=1e-11)


def test_expand_poly_json(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"dim": 1, "terms": [{"alpha": [2], "coef": "1/2"}, {"alpha": [4], "coef": "1/24"}]}))
    code, out, _ = run(capsys, "expand", "--family", "poly", "--poly-json", str(path), "--theta", "0")
    assert code == EXIT_OK
    row = rows(out)[0]
    assert row["cramer_ok"] == "unknown"
    # g = 1, kappa4 = 1, kappa3 = 0 at theta = 0, so F1 = 1/8
    assert float(row["F1"]) == pytest.approx(0.125)


def test_complexity_exponential(capsys):
    code, out, _ = run(capsys, "complexity", "--family", "exp1d", "--n", "100", "--s", "1")
    assert code == EXIT_OK
    row = rows(out)[0]
    want = 0.5 * math.log(100 / (2 * math.pi)) + math.log(1 - 1 / 1200)
    assert float(row["total"]) == pytest.approx(want, abs=1e-11)
    assert float(row["volK"]) == pytest.approx(1.0, abs=1e-11)


def test_complexity_json_and_output_file(capsys, tmp_path):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "complexity", "--family", "spherical", "--dim", "2",
                       "--box", "-1", "1", "--box", "-2", "-0.5", "--n", "20", "--n", "40",
                       "--format", "json", "--output", str(target))
    assert code == EXIT_OK and out == ""
    doc = json.loads(target.read_text())
    assert doc["schema_version"] == 1 and doc["command"] == "complexity"
    assert [r["n"] for r in doc["rows"]] == [20, 40]
    assert set(doc["columns"]) == set(doc["rows"][0])


def test_compare_rows_and_sorting(capsys):
    code, out, _ = run(capsys, "compare", "--d-min", "10", "--d-max", "11", "--n", "50", "--n", "20")
    assert code == EXIT_OK
    got = rows(out)
    assert [(int(r["d"]), int(r["n"])) for r in got] == [(10, 20), (10, 50), (11, 20), (11, 50)]
    assert float(got[-1]["over_s0"]) > 0.05


def test_compare_is_byte_identical_across_threads(capsys, monkeypatch):
    args = ("compare", "--d-max", "6", "--n-max", "60")
    monkeypatch.setenv("NML_THREADS", "1")
    _, first, _ = run(capsys, *args)
    monkeypatch.setenv("NML_THREADS", "4")
    _, second, _ = run(capsys, *args)
    _, third, _ = run(capsys, *args, "--closed-form-f1")
    assert first == second
    assert len(rows(first)) == sum(60 - max(d, 2) + 1 for d in range(2, 7))
    a, b = rows(first), rows(third)
    assert all(float(x["over_s1"]) == pytest.approx(float(y["over_s1"]), abs=1e-11) for x, y in zip(a, b))


def test_precision_is_twelve_digits(capsys):
    _, out, _ = run(capsys, "expand", "--theta", "-1")
    f1 = rows(out)[0]["F1"]
    assert f1 == format(-1 / 12, ".12g")


@pytest.mark.parametrize("argv", [
    ("compare", "--d-min", "5", "--n", "4"),
    ("compare", "--d-min", "1"),
    ("complexity", "--family", "spherical", "--n", "10"),
    ("complexity", "--family", "exp1d", "--box", "-1", "-2", "--n", "10"),
    ("expand", "--family", "poly"),
    ("expand", "--family", "exp1d", "--dim", "3"),
    ("expand", "--theta", "abc"),
])
def test_config_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_CONFIG
    assert "config error" in err and out == ""


@pytest.mark.parametrize("argv", [
    ("expand", "--family", "exp1d", "--theta", "1"),
    ("complexity", "--family", "exp1d", "--box", "-1", "1", "--n", "10"),
    ("complexity", "--family", "spherical", "--dim", "11",
     *[x for _ in range(10) for x in ("--box", "-1", "1")], "--box", "-2", "-1", "--n", "1", "--nodes", "2"),
])
def test_math_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_MATH
    assert err.startswith("parcomp:") and out == ""


def test_bad_threads_env(capsys, monkeypatch):
    monkeypatch.setenv("NML_THREADS", "many")
    code, _, _ = run(capsys, "compare", "--d-max", "2", "--n-max", "3")
    assert code == EXIT_CONFIG


def test_validate_hermite_and_failure_exit(capsys, monkeypatch):
    code, out, _ = run(capsys, "validate", "--suite", "hermite")
    assert code == EXIT_OK
    assert all(r["passed"] == "true" for r in rows(out))

    import parcomp.cli as cli
    from parcomp.validation import Check

    monkeypatch.setattr(cli, "run_suite", lambda name, seed: [Check("x", "broken", False, 1.0, 0.0, 0.1)])
    code, _, _ = run(capsys, "validate", "--suite", "hermite")
    assert code == EXIT_VALIDATION


def test_validate_exp_oracle(capsys):
    code, out, _ = run(capsys, "validate", "--suite", "exp-oracle", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert [r["check"] for r in doc["rows"]] == ["n1", "n2", "n3"]


@pytest.mark.slow
def test_validate_ac_is_seed_reproducible(capsys):
    _, first, _ = run(capsys, "validate", "--suite", "ac", "--seed", "42")
    code, second, _ = run(capsys, "validate", "--suite", "ac", "--seed", "42")
    assert code == EXIT_OK and first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "parcomp", "expand", "--theta", "-2", "--format", "json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["F1"] == pytest.approx(-1 / 12)
    proc = subprocess.run([sys.executable, "-m", "parcomp", "bogus"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
