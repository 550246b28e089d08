import csv
import io
import json

import pytest

from multoep import cli

SIEVE = ["--sieve-limit", "1e6"]

MOD3 = {"kind": "modified_character", "character": {"modulus": 3, "index": 1}, "kappa": {"2": {"geometric": [0, 1]}}, "label": "ex_mod3"}
ONE = {"kind": "character", "character": {"modulus": 1, "principal": True}}
LIOUVILLE = {"kind": "liouville"}
CHI3 = {"kind": "character", "character": {"modulus": 3, "index": 1}}


@pytest.fixture
def spec(tmp_path):
    def write(obj, name="f.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(p)

    return write


def run_json(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def csv_rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.reader(io.StringIO(body)))


def test_classify_mod3(capsys, spec):
    code, rep = run_json(capsys, ["classify", "--spec", spec(MOD3)] + SIEVE)
    assert code == 0
    assert rep["toeplitz"] is True and rep["periodic"] is False and rep["automatic_nonsingular"] is True
    assert rep["spectrum"] == [2, 3] and rep["nu"] == {"2": "inf@12", "3": 1}
    assert rep["p"] == 2
    assert rep["command"] == "classify" and len(rep["spec_hash"]) == 64
    assert rep["config"]["sieve_limit"] == 10**6


def test_classify_constant(capsys, spec):
    code, rep = run_json(capsys, ["classify", "--spec", spec(ONE), "--N", "1e5"] + SIEVE)
    assert code == 0 and rep["periodic"] is True and rep["M"] == 1 and rep["conductor"] == 1


def test_classify_non_toeplitz(capsys, spec):
    code, rep = run_json(capsys, ["classify", "--spec", spec(LIOUVILLE), "--N", "1e5"] + SIEVE)
    assert code == 2 and rep["toeplitz"] is False and rep["witness"] is not None


def test_distance_curve_csv(capsys, spec):
    code = cli.main(["distance", "--spec", spec(LIOUVILLE), "--against", "principal", "--cutoffs", "1e3,1e4,1e5"] + SIEVE)
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("# command: \"distance\"")
    rows = csv_rows(out)
    assert rows[0] == ["cutoff", "value"]
    xs = [int(r[0]) for r in rows[1:]]
    ys = [float(r[1]) for r in rows[1:]]
    assert xs == [1000, 10000, 100000]
    assert all(b >= a for a, b in zip(ys, ys[1:]))


def test_distance_against_file(capsys, spec):
    code, rep = run_json(capsys, ["distance", "--spec", spec(MOD3), "--against", spec(CHI3, "g.json"), "--cutoffs", "10,1e4", "--format", "json"] + SIEVE)
    assert code == 0
    assert [round(p[1], 12) for p in rep["curve"]["points"]] == [round(4 / 3, 12)] * 2


@pytest.mark.parametrize(
    "argv",
    [
        ["periods", "--N", "1e5", "--positions", "1,2,4"],
        ["scan-aperiodicity", "--X", "1e4", "--Q", "3"],
        ["scan-aperiodicity", "--X", "1e4", "--mode", "moderate", "--format", "json"],
        ["kmt-window", "--X", "1e6", "--eta", "0.5,0.8"],
        ["mean", "--N", "1e3,1e4", "--a", "3", "--r", "1"],
        ["correlate", "--shifts", "0,2", "--N", "1e3,1e4", "--conjugate", "0,1"],
        ["seminorm", "--N", "1e4", "--H", "30"],
        ["seminorm", "--order", "2", "--N", "1e4", "--threads", "2"],
        ["rap", "--q", "1,3,6", "--N", "1e4"],
        ["l1fu", "--M", "1000", "--H", "20"],
        ["local-factors", "--chi", "chi:3:1", "--P", "100"],
    ],
    ids=lambda a: a[0] + "-" + "-".join(a[1:3]),
)
def test_commands_run(capsys, spec, argv):
    code = cli.main([argv[0], "--spec", spec(MOD3)] + argv[1:] + SIEVE)
    out = capsys.readouterr().out
    assert code == 0
    if out.startswith("{"):
        rep = json.loads(out)
        assert rep["command"] == argv[0]
    else:
        assert len(csv_rows(out)) >= 2


def test_output_file(capsys, spec, tmp_path):
    out = tmp_path / "r.json"
    code = cli.main(["seminorm", "--spec", spec(ONE), "--N", "1000", "--H", "10", "-o", str(out)] + SIEVE)
    assert code == 0 and capsys.readouterr().out == ""
    rep = json.loads(out.read_text())
    assert rep["value"] == 1.0 and rep["config"]["output"] == str(out)


def test_malformed_spec(capsys, spec):
    code = cli.main(["classify", "--spec", spec('{"kind":\n')] + SIEVE)
    err = capsys.readouterr().err
    assert code == 1 and "line 2" in err


def test_bad_field(capsys, spec):
    bad = {"kind": "modified_character", "character": {"modulus": 3, "index": 1}, "kappa": {"two": {"geometric": [0, 1]}}}
    code = cli.main(["classify", "--spec", spec(bad)] + SIEVE)
    err = capsys.readouterr().err
    assert code == 1 and "spec.kappa" in err


def test_missing_file(capsys):
    assert cli.main(["classify", "--spec", "/nonexistent/f.json"] + SIEVE) == 1
    assert "error:" in capsys.readouterr().err


def test_bad_flags(capsys, spec):
    assert cli.main(["classify", "--spec", spec(ONE), "--tolerance", "0.5"] + SIEVE) == 1
    assert cli.main(["classify", "--spec", spec(ONE), "--sieve-limit", "10"]) == 1
    assert cli.main(["classify", "--spec", spec(ONE), "--threads", "0"] + SIEVE) == 1
    assert cli.main(["nonsense"]) == 1
    assert cli.main(["distance", "--spec", spec(ONE), "--against", "chi:3:7"] + SIEVE) == 1
    capsys.readouterr()


def test_env_sieve_limit(monkeypatch):
    monkeypatch.setenv(cli.SIEVE_ENV, "2e5")
    assert cli.default_sieve_limit() == 200000
    monkeypatch.setenv(cli.SIEVE_ENV, "lots")
    with pytest.raises(ValueError):
        cli.default_sieve_limit()


def test_verify_unknown_suite(capsys):
    assert cli.main(["verify", "nonsense"] + SIEVE) == 1
    assert "unknown suite" in capsys.readouterr().err


def test_verify_characters_deterministic(capsys):
    code, a = run_json(capsys, ["verify", "characters", "--seed", "7"] + SIEVE)
    code2, b = run_json(capsys, ["verify", "characters", "--seed", "7"] + SIEVE)
    assert code == code2 == 0 and a == b and a["passed"]


def test_clean():
    assert cli._clean({"a": 1 + 2j, 3: float("inf"), "n": float("nan")}) == {"a": [1.0, 2.0], "3": "inf", "n": "nan"}
