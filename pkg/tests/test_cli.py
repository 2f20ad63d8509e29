"""End-to-end tests of the command line front end."""

import json

import pytest

from octqft.cli import main
from octqft.kfa import make_semisimple_kfa


@pytest.fixture()
def kfa_path(tmp_path):
    p = tmp_path / "k21.json"
    p.write_text(json.dumps(make_semisimple_kfa(2, 1).to_json()))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_check_kfa_valid(capsys, kfa_path):
    code, out = run(capsys, ["check-kfa", "--kfa", kfa_path])
    report = json.loads(out)
    assert code == 0
    assert report["valid"] is True
    assert report["first_violation"] is None


def test_check_kfa_invalid_exits_one(capsys, tmp_path):
    obj = make_semisimple_kfa(2, 1).to_json()
    obj["zipper"][0][0] = "7"
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(obj))
    code, out = run(capsys, ["check-kfa", "--kfa", str(p)])
    assert code == 1
    assert json.loads(out)["valid"] is False


def test_invariants_table(capsys, kfa_path):
    code, out = run(capsys, ["invariants", "--kfa", kfa_path, "--gmax", "2", "--wmax", "3"])
    assert code == 0
    values = json.loads(out)["values"]
    assert values[0] == ["1", "2", "4", "8"]
    assert values[2][1] == "2"


def test_character_roundtrips_through_classify(capsys, kfa_path, tmp_path):
    code, out = run(capsys, ["character", "--kfa", kfa_path])
    assert code == 0
    form_path = tmp_path / "form.json"
    form_path.write_text(out)
    code2, out2 = run(capsys, ["classify", "--form", str(form_path)])
    assert code2 == 0
    echoed = json.loads(out2)
    original = json.loads(out)
    assert echoed["status"] == "good"
    assert echoed["poly"] == original["poly"]
    assert echoed["exp"] == original["exp"]


def test_classify_rational_good(capsys):
    code, out = run(capsys, ["classify", "--rational", "1/((1-2X)(1-3Y))"])
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "good"
    assert report["exp"] == [{"coeff": "1", "lambda": "2", "mu": "3"}]


def test_classify_rational_bad_exits_one(capsys):
    code, out = run(capsys, ["classify", "--rational", "1/(1-Y)"])
    assert code == 1
    assert json.loads(out)["status"] == "not_good"


def test_classify_table_from_file(capsys, tmp_path):
    rows = [[str(2 ** w) for w in range(9)] for g in range(9)]
    p = tmp_path / "table.json"
    p.write_text(json.dumps({"values": rows}))
    code, out = run(capsys, ["classify", "--table", str(p)])
    assert code == 0
    report = json.loads(out)
    assert report["exp"] == [{"coeff": "1", "lambda": "1", "mu": "2"}]


def test_eval_scalar(capsys, kfa_path):
    code, out = run(capsys, ["eval", "--term", "uS ; z ; eI", "--kfa", kfa_path])
    assert code == 0
    assert json.loads(out) == "2"


def test_eval_matrix(capsys, kfa_path):
    code, out = run(capsys, ["eval", "--term", "dI ; mI", "--kfa", kfa_path])
    assert code == 0
    m = json.loads(out)
    assert len(m) == 4 and len(m[0]) == 4


def test_eval_bad_term_usage_error(capsys, kfa_path):
    code = main(["eval", "--term", "uS ;; eI", "--kfa", kfa_path])
    capsys.readouterr()
    assert code == 2


def test_gram_rank_report(capsys):
    chi = json.dumps({"exp": [{"lambda": "1", "mu": "3", "coeff": "2"}]})
    code, out = run(capsys, ["gram", "--object", "S", "--char", chi, "--no-matrix"])
    assert code == 0
    report = json.loads(out)
    assert report == {"gram": None, "object": "S", "rank": 2, "witness": None}


def test_idempotents_report(capsys):
    chi = json.dumps({"exp": [{"lambda": "1", "mu": "2", "coeff": "1"}]})
    code, out = run(capsys, ["idempotents", "--char", chi, "--gmax", "2", "--wmax", "2"])
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert report["components"] == {"1,2": True}


def test_scale_output_reloads(capsys, kfa_path):
    code, out = run(capsys, ["scale", "--kfa", kfa_path, "--s", "1/2"])
    assert code == 0
    original = json.loads(open(kfa_path).read())
    scaled = json.loads(out)
    from fractions import Fraction

    # counits pick up s^-1 (open) and s^-2 (closed)
    for sector, power in (("open", 2), ("closed", 4)):
        got = [Fraction(x) for x in scaled[sector]["counit"]]
        want = [Fraction(x) * power for x in original[sector]["counit"]]
        assert got == want


def test_scale_composes_with_character(capsys, kfa_path, tmp_path):
    code, out = run(capsys, ["scale", "--kfa", kfa_path, "--s", "2"])
    p = tmp_path / "scaled.json"
    p.write_text(out)
    code, out = run(capsys, ["character", "--kfa", str(p)])
    assert code == 0


def test_output_deterministic(capsys, kfa_path):
    _, out1 = run(capsys, ["character", "--kfa", kfa_path])
    _, out2 = run(capsys, ["character", "--kfa", kfa_path])
    assert out1 == out2


def test_output_file(capsys, kfa_path, tmp_path):
    dest = tmp_path / "report.json"
    code = main(["check-kfa", "--kfa", kfa_path, "-o", str(dest)])
    capsys.readouterr()
    assert code == 0
    assert json.loads(dest.read_text())["valid"] is True


def test_inline_json_and_stdin(capsys, kfa_path, monkeypatch):
    import io

    blob = open(kfa_path).read()
    code, out = run(capsys, ["invariants", "--kfa", blob, "--gmax", "1", "--wmax", "1"])
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(blob))
    code2, out2 = run(capsys, ["invariants", "--kfa", "-", "--gmax", "1", "--wmax", "1"])
    assert code2 == 0
    assert out == out2


def test_missing_file_usage_error(capsys):
    code = main(["check-kfa", "--kfa", "/nonexistent/nowhere.json"])
    capsys.readouterr()
    assert code == 2


def test_malformed_json_usage_error(capsys):
    code = main(["check-kfa", "--kfa", "{not json"])
    capsys.readouterr()
    assert code == 2


def test_unknown_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    capsys.readouterr()
    assert exc.value.code == 2
