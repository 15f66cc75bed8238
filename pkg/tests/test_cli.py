import json

import pytest
from click.testing import CliRunner

from egzkit.cli import SchemaError, canonical_json, digest, load_artifact, main, run_command


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(*argv):
    res = CliRunner().invoke(main, list(argv))
    return res.exit_code, res.stdout, res.stderr


def square(tmp_path):
    return write(tmp_path, "square.json", {"ambient_dim": 2, "vertices": [[0, 0], [1, 0], [0, 1], [1, 1]]})


def multiset(tmp_path, name="X.json", elements=((0, 0, 1), (1, 1, 1), (2, 2, 1), (0, 1, 2))):
    return write(tmp_path, name, {"n": 3, "dim": 2, "elements": [{"vec": [a, b], "mult": m} for a, b, m in elements]})


def test_canonical_json_and_digest():
    assert canonical_json({"b": [1, 2], "a": "x"}) == '{"a":"x","b":[1,2]}'
    assert digest({"b": 1, "a": 2}) == digest({"a": 2, "b": 1})
    assert len(digest({})) == 64


def test_egz_s():
    code, out, _ = run("egz", "s", "--n", "3", "--d", "1")
    got = json.loads(out)
    assert code == 0 and got["s"] == 5
    assert sum(e["mult"] for e in got["witness"]["elements"]) == 4


def test_poly_hollow_exit_codes(tmp_path):
    code, out, _ = run("poly", "hollow", "--input", square(tmp_path))
    assert code == 0 and json.loads(out)["verdict"] == "hollow"
    pent = write(tmp_path, "pent.json", {"ambient_dim": 2, "vertices": [[0, 0], [1, 0], [2, 1], [1, 2], [0, 1]]})
    code, out, _ = run("poly", "hollow", "--input", pent)
    assert code == 1 and json.loads(out)["verdict"] != "hollow"


def test_zerosum_find_and_verify(tmp_path):
    X = multiset(tmp_path)
    cert = str(tmp_path / "c.json")
    assert run("--out", cert, "zerosum", "find", "--input", X)[0] == 0
    assert run("zerosum", "verify", "--cert", cert, "--input", X)[0] == 0
    # tampering with the chosen vectors breaks the certificate
    obj = json.loads(open(cert).read())
    obj["chosen"][0]["vec"] = [2, 2]
    bad = write(tmp_path, "bad.json", obj)
    code, _, err = run("zerosum", "verify", "--cert", bad, "--input", X)
    assert code == 2 and json.loads(err)["kind"] == "error"


def test_zerosum_find_negative(tmp_path):
    X = write(tmp_path, "cube.json", {"n": 3, "dim": 1, "elements": [{"vec": [0], "mult": 2}, {"vec": [1], "mult": 2}]})
    code, out, _ = run("zerosum", "find", "--input", X)
    assert code == 1 and json.loads(out)["found"] is False


def test_digest_mismatch(tmp_path):
    X = multiset(tmp_path)
    cert = str(tmp_path / "c.json")
    run("--out", cert, "zerosum", "find", "--input", X)
    other = multiset(tmp_path, "Y.json", ((0, 0, 3), (1, 1, 2)))
    code, _, err = run("zerosum", "verify", "--cert", cert, "--input", other)
    assert code == 2 and json.loads(err)["type"] == "DigestError"


def test_schema_error_pointer(tmp_path):
    bad = write(tmp_path, "bad.json", {"n": 3, "dim": 2, "elements": [{"vec": [1], "mult": 1}]})
    with pytest.raises(SchemaError) as e:
        load_artifact(bad)
    assert e.value.pointer == "/elements/0/vec"
    code, _, err = run("zerosum", "find", "--input", bad)
    assert code == 2 and json.loads(err)["pointer"] == "/elements/0/vec"


def test_load_artifact_kinds(tmp_path):
    art = load_artifact(multiset(tmp_path))
    assert art.kind == "multiset" and art.digest == digest(art.payload)
    assert load_artifact(square(tmp_path)).kind == "polytope"


def test_unknown_command_and_budget():
    code, _, err = run("frobnicate")
    assert code == 2 and json.loads(err)["kind"] == "error"
    code, _, err = run("--budget", "5", "egz", "s", "--n", "5", "--d", "2")
    assert code == 2 and json.loads(err)["type"] == "BudgetExceeded"


def test_run_command_in_process(capsys):
    assert run_command(["egz", "s", "--n", "2", "--d", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["s"] == 3
    assert run_command(["nope"]) == 2


def test_config_and_record(tmp_path):
    code, out, _ = run("config")
    cfg = json.loads(out)
    assert code == 0 and cfg["jobs"] == 1 and cfg["max_steps"] == 200
    rec = tmp_path / "rec.json"
    X = multiset(tmp_path)
    run("--record", str(rec), "zerosum", "find", "--input", X)
    got = json.loads(rec.read_text())
    assert got["exit"] == 0 and got["config"]["jobs"] == 1
    assert list(got["inputs"].values()) == [load_artifact(X).digest]


def test_deterministic_across_runs_and_jobs():
    outs = {run("--jobs", str(j), "poly", "search", "--d", "2", "--box", "2", "--k", "4")[1] for j in (1, 1, 2)}
    assert len(outs) == 1


def test_poly_commands(tmp_path):
    sq = square(tmp_path)
    code, out, _ = run("poly", "classify2d", "--input", sq)
    assert code == 0 and json.loads(out)["class"] == "Trapezoid"
    code, out, _ = run("poly", "product", "--left", sq, "--right", sq)
    assert code == 0 and len(json.loads(out)["vertices"]) == 16
    code, out, _ = run("poly", "crit", "--input", sq, "--point", "1/2,1/2", "--window", "5")
    assert code == 1 and json.loads(out)["cond1"] is False


def test_decomp_run_verify_wstr(tmp_path):
    S = write(tmp_path, "S.json", {"n": 7, "dim": 1, "elements": [{"vec": [0], "mult": 6}, {"vec": [1], "mult": 6}]})
    pts = write(tmp_path, "set.json", [[0], [1]])
    res = str(tmp_path / "run.json")
    assert run("--out", res, "decomp", "run", "--input", S)[0] == 0
    code, out, _ = run("decomp", "verify", "--input", res, "--against", S)
    assert code == 0 and json.loads(out)["valid"]
    code, out, _ = run("decomp", "wstr", "--input", res, "--set", pts)
    assert code == 0 and json.loads(out)["accepted"]


def test_report(tmp_path):
    md = tmp_path / "report.md"
    code, out, _ = run("report", "--out", str(md), "--only", "1,3")
    assert code == 0 and json.loads(out)["passed"]
    lines = md.read_text().splitlines()
    assert len(lines) == 4 and lines[2].startswith("| 1 |") and "pass" in lines[3]
