import io
import json

import pytest

from betavote.cli import main


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out)
    return code, out.getvalue()


def payload(text):
    return json.loads(text)["payload"]


def test_tally_beta(golden):
    code, out = run("tally", golden / "e1.csv", "--rule", "beta", "--k", "2")
    assert code == 0
    p = payload(out)
    assert p["scores"] == {"A": "7", "B": "7", "C": "6"}
    assert p["winners"] == ["A", "B"]
    assert p["k"] == "2"


def test_tally_approval(golden):
    code, out = run("tally", golden / "e1.csv", "--rule", "approval")
    assert code == 0 and payload(out)["scores"] == {"A": "6", "B": "5", "C": "3"}


def test_tally_rational_k(golden):
    code, out = run("tally", golden / "e1.csv", "--k", "5/2")
    p = payload(out)
    assert p["k"] == "5/2" and p["scores"]["A"] == "15/2" and p["scores_decimal"]["A"] == 7.5


def test_tally_json_input_and_seed(golden):
    code, out = run("tally", golden / "remark_approval.json", "--k", "5/4", "--seed", "9")
    assert code == 0
    assert payload(out)["winners"] == ["C1"] and payload(out)["selected"] == "C1"


def test_tally_bad_file(golden, capsys):
    code, _ = run("tally", golden / "bad.csv", "--rule", "approval")
    assert code == 2
    assert "line 3" in capsys.readouterr().err


def test_tally_missing_file(tmp_path):
    assert run("tally", tmp_path / "nope.csv", "--rule", "approval")[0] == 2


def test_tally_domain_error(golden):
    assert run("tally", golden / "e1.csv", "--k", "1/2")[0] == 3
    assert run("tally", golden / "e1.csv", "--k", "abc")[0] == 2
    assert run("tally", golden / "e1.csv", "--rule", "beta")[0] == 2


def test_intervals_e1(golden):
    code, out = run("intervals", golden / "e1.csv")
    p = payload(out)
    got = {row["candidate"]: [(iv["lo"], iv["hi"]) for iv in row["intervals"]] for row in p["intervals"]}
    assert got == {"A": [("1", "2")], "B": [("2", "3")], "C": [("3", "inf")]}
    assert p["breakpoints"] == ["2", "3"]


def test_intervals_e2(golden):
    p = payload(run("intervals", golden / "e2.csv")[1])
    assert [row["candidate"] for row in p["intervals"]] == ["A", "C"]
    assert p["excluded"] == ["B"]


def test_intervals_single(golden):
    p = payload(run("intervals", golden / "single.csv")[1])
    assert p["intervals"] == [{"candidate": "A", "intervals": [
        {"lo": "1", "hi": "inf", "lo_closed": True, "hi_closed": False,
         "lo_decimal": 1.0, "hi_decimal": None}]}]


def test_intervals_tsv(golden):
    code, out = run("intervals", golden / "e1.csv", "--format", "tsv")
    rows = [l.split("\t") for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == ["k", "k_decimal", "winners"]
    table = {r[0]: r[2] for r in rows[1:]}
    assert table["1"] == "A" and table["2"] == "A,B" and table["3"] == "B,C" and table["4"] == "C"


def test_check_pareto(golden):
    code, out = run("check", golden / "pareto_profile.json", "--criterion", "pareto", "--k", "1")
    assert code == 1
    assert payload(out)["witness"]["violations"][0]["candidate"] == "C2"
    code, out = run("check", golden / "pareto_profile.json", "--criterion", "pareto", "--k", "2")
    assert code == 0


def test_check_pareto_needs_profile(golden):
    assert run("check", golden / "e1.csv", "--criterion", "pareto", "--k", "2")[0] == 2


def test_check_monotonicity(golden):
    code, out = run("check", golden / "e1.csv", "--criterion", "monotonicity", "--k", "2", "--seed", "4")
    assert code == 0 and payload(out)["holds"]
    assert run("check", golden / "e1.csv", "--criterion", "monotonicity", "--k", "2")[0] == 3


def test_check_unanimous_and_dictatorship(golden):
    code, out = run("check", golden / "remark_approval.json", "--criterion", "unanimous_winner", "--k", "3")
    assert code == 0 and payload(out)["details"]["unanimous"] == ["C1"]
    assert run("check", golden / "e1.csv", "--criterion", "non_dictatorship")[0] == 0
    assert run("check", golden / "remark_plurality.csv", "--criterion", "non_dictatorship")[0] == 3


def test_witness_replayable(golden, tmp_path):
    code, out = run("check", golden / "pareto_profile.json", "--criterion", "pareto", "--k", "1")
    witness = payload(out)["witness"]
    f = tmp_path / "witness.json"
    f.write_text(json.dumps(witness["election"]))
    code, out = run("tally", f, "--rule", "approval")
    assert payload(out)["winners"] == ["C1", "C2"]


def write_config(tmp_path, **kw):
    cfg = {"n_range": [1, 8], "c_range": [2, 5], "samples": 200, "k_grid": ["1"], "seed": 1}
    cfg.update(kw)
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps(cfg))
    return f


@pytest.mark.parametrize("expr, field", [
    ("1", "beta_eq_approval"),
    ("n+1", "beta_sub_plurality"),
    ("1+1/(2n)", "beta_sub_approval"),
])
def test_simulate_regimes(tmp_path, expr, field):
    f = write_config(tmp_path, k_grid=[expr])
    code, out = run("simulate", f)
    assert code == 0
    assert payload(out)["stats"]["per_k"][expr][field] == "1"


def test_simulate_requires_seed(tmp_path):
    cfg = {"samples": 5, "k_grid": ["1"]}
    f = tmp_path / "cfg.json"
    f.write_text(json.dumps(cfg))
    assert run("simulate", f)[0] == 3
    assert run("simulate", f, "--seed", "3")[0] == 0


def test_simulate_tsv(tmp_path):
    f = write_config(tmp_path, k_grid=["1", "c"])
    code, out = run("simulate", f, "--format", "tsv")
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0].startswith("k\tevaluated") and len(lines) == 3


def test_search(tmp_path):
    f = write_config(tmp_path)
    code, out = run("search", f, "--criterion", "approval_non_pareto")
    assert code == 1 and len(payload(out)["witness"]["profile"]["candidates"]) == 2
    code, out = run("search", f, "--criterion", "beta_non_pareto_below_bound", "--k", "c")
    assert code == 0 and payload(out)["witness"] is None


def test_usage_error():
    assert run("tally")[0] == 2
    assert run("frobnicate")[0] == 2
