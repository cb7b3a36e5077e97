import json

import pytest

from threerank.arith import CongruenceClass, count_S
from threerank.cli import main


@pytest.fixture
def run(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("THREERANK_CACHE_DIR", str(tmp_path / "cache"))

    def go(*argv):
        code = main([str(a) for a in argv])
        out = capsys.readouterr()
        return code, out.out, out.err

    return go


@pytest.fixture
def family(tmp_path):
    p = tmp_path / "fam.txt"
    p.write_text("n 1\n+ 1 3\n- 1 1\n")
    return p


def test_rank(run):
    assert run("rank", "-D", -23) == (0, "-23 1\n", "")
    assert run("rank", "-D", 20)[1] == "5 0\n"
    assert run("rank", "-D", 0)[0] == 2


def test_good_pair(run):
    assert run("good-pair", 3, 4)[1] == "not-good (clause ii)\n"
    assert run("good-pair", 9, 3)[1] == "not-good (clause i)\n"
    assert run("good-pair", 1, 4)[1] == "good\n"
    assert run("good-pair", 0, 4)[0] == 2


def test_cl_prob(run):
    code, out, _ = run("cl-prob", "--p", 3, "--r", 0, "--sign", "-")
    assert code == 0 and out.startswith("0.560126077") and len(out.strip().replace("0.", "", 1)) == 12


def test_normalize_and_omega(run, family):
    code, out, _ = run("normalize", "--family", family)
    data = json.loads(out)
    assert data["B"] == 16 and [p["lambda_i"] for p in data["polys"]] == [1, -1]
    code, out, _ = run("omega3", "--family", family, "--pmax", 1000, "--show", 3)
    data = json.loads(out)
    assert data["omega"]["2"] == 0 and len(data["omega"]) == 3 and data["value"] > 0


def test_count_and_mean(run, tmp_path):
    code, out, _ = run("count", "--X", "1e4", "--m", 1, "--N", 4, "--sign", "+")
    assert code == 0 and json.loads(out)["population"] == count_S(10**4, CongruenceClass(1, 4), 1)
    code, cold, _ = run("mean", "--X", 20000, "--sign", "-")
    assert code == 0
    code, hot, _ = run("mean", "--X", 20000, "--sign", "-")
    assert hot == cold
    assert (tmp_path / "cache" / "ranks.csv").exists()


def test_strict_turns_failure_into_exit_one(run):
    code, out, _ = run("mean", "--X", 100, "--sign", "-", "--strict")
    assert json.loads(out)["pass"] is False and code == 1
    assert run("mean", "--X", 100, "--sign", "-")[0] == 0


def test_table_and_determinism(run, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("table", "--min", -3000, "--max", 3000, "--out", a, "--threads", 1)[0] == 0
    assert run("table", "--min", -3000, "--max", 3000, "--out", b, "--threads", 4)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert run("table", "--min", 5, "--max", 1, "--out", a)[0] == 2


def test_witness_and_corollary(run, family):
    code, out, _ = run("witness", "--family", family, "--X", 3000, "--witness-cap", 2, "--strict")
    data = json.loads(out)
    assert code == 0 and data["satisfied"] and len(data["witnesses"]) == 2
    code, out, _ = run("corollary", "--n", 1, "--part", 2, "--X", 3000)
    assert code == 0 and json.loads(out)["total"] > 0
    assert run("corollary", "--n", 1, "--part", 3, "--X", 3000)[0] == 2


def test_polyprog(run, tmp_path):
    p = tmp_path / "p.txt"
    p.write_text("binom 0 1\npower 0 0 1\n")
    code, out, _ = run("polyprog", "--polys", p, "--n", 1, "--amax", 100, "--dmax", 10)
    a, d = map(int, out.split())
    assert code == 0 and a <= 100 and d <= 10
    assert run("polyprog", "--polys", p, "--n", 1, "--amax", 1, "--dmax", 1)[1] == "not-found\n"
    assert run("polyprog", "--polys", p, "--n", 1, "--amax", 1, "--dmax", 1, "--strict")[0] == 1


def test_usage_and_cache_errors(run, tmp_path):
    assert run("bogus")[0] == 2
    assert run("rank")[0] == 2
    assert run("normalize", "--family", tmp_path / "missing.txt")[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("junk\n")
    (tmp_path / "bad.csv.manifest.json").write_text('{"intervals": [[1, 5]], "format": 1}')
    assert run("mean", "--X", 100, "--sign", "+", "--cache", bad)[0] == 3
    assert run("verify", "--suite", "nope")[0] == 2


def test_config_file_is_overridden_by_flags(run, tmp_path, family):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"witness_cap": 1}))
    _, out, _ = run("witness", "--family", family, "--X", 3000, "--config", conf)
    assert len(json.loads(out)["witnesses"]) == 1
    _, out, _ = run("witness", "--family", family, "--X", 3000, "--config", conf, "--witness-cap", 4)
    assert len(json.loads(out)["witnesses"]) == 4
    conf.write_text(json.dumps({"colour": 1}))
    assert run("rank", "-D", 5, "--config", conf)[0] == 2


def test_verify_suite(run):
    code, out, _ = run("verify", "--suite", "c10")
    assert code == 0 and out == "criterion 10 polynomial progression witness: PASS\n"
